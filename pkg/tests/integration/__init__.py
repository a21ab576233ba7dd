# Integration tests - acceptance runs of the shipped recipes
