//! Box tensor product and cable complex extraction (filled in later).
