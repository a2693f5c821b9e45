"""Обработчики команд CLI и ошибок"""
