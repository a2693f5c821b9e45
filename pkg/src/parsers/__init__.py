"""Парсеры входных форматов (FCIDUMP)"""
