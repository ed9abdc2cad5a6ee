//! Non-thinness witness extraction (filled in later).
