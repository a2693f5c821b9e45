"""Тесты ci-sim"""
