"""Tests for presentation layer"""
