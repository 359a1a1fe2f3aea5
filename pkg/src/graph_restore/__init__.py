"""Graph restoration from a random-walk crawl."""
__version__ = "0.1.0"
