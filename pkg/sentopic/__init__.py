"""
sentopic: sentiment-augmented Replicated Softmax topic models
"""

__version__ = "0.1.0"
