//! Deterministic SVG rendering of bordered diagrams (filled in later).
