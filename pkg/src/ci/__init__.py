"""Пространство конфигураций, интегралы, правила Слэтера, раскраска, эволюция"""
