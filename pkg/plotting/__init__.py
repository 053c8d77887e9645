"""Plot specifications and their SVG, CSV and JSON renderings."""
