"""
Разреженное представление полного КВ и симуляция эволюции произведениями Троттера
"""

__version__ = "1.0.0"
