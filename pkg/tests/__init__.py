# weylwalk test suite
