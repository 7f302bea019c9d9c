"""Config-driven experiment runner and its command line."""
