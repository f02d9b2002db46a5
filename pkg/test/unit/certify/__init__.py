# Unit tests for certify package
