"""Tests for services layer"""
