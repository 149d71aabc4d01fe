# Go rules module
