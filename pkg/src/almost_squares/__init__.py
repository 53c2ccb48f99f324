"""Almost squares in short intervals: exact searches and exponential-sum experiments."""
