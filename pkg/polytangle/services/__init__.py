"""Services package for polytangle."""
