"""Test suite for polytangle."""
