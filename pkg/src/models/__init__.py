"""Модели отчётов"""
