"""Ядро системы - конфигурация, логирование, валидация, метрики"""
