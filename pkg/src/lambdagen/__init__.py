"""Generate, count and uniformly sample simply-typed de Bruijn lambda terms."""
