# Test placeholder file to make tests directory a package
