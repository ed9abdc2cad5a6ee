//! Model knot Floer complexes over F2[U] and their classical invariants.
//!
//! A `ModelComplex` is a finite free F2[U]-complex with a basis of generators
//! carrying Alexander (A) and Maslov (M) gradings, and differential arrows
//! `src -> U^k dst` subject to
//!
//! ```text
//!   M(src) - M(dst) = 1 - 2k          (the differential drops Maslov by 1)
//!   A(dst) - k <= A(src)              (the differential respects the filtration)
//!   k = 0  =>  A(dst) < A(src)        (reduced: U^0 arrows strictly drop A)
//! ```
//!
//! Arrows are classified as vertical (k = 0), horizontal (A(dst) - k = A(src),
//! k >= 1), or diagonal (strict inequality, k >= 1).
//!
//! The module provides a small catalog of named complexes, a plain text
//! format, mirroring, a best-effort simplification into a basis where the
//! vertical and horizontal arrows each form perfect matchings away from one
//! generator each (xi0 and eta0), and the concordance invariants tau, nu,
//! epsilon computed by two independent routes.

use crate::f2::{kernel_basis, BitVec, Echelon};
use crate::laurent::{gcd, torus_alexander, Laurent};
use crate::{CfError, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

/// A basis generator with its Alexander and Maslov gradings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    #[serde(rename = "A")]
    pub alexander: i64,
    #[serde(rename = "M")]
    pub maslov: i64,
}

/// A differential arrow src -> U^upower dst (indices into the generator list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub upower: u32,
}

/// Classification of an arrow by how it interacts with the Alexander grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrowClass {
    /// k = 0; strictly drops A.
    Vertical,
    /// k >= 1 and A(dst) - k = A(src).
    Horizontal,
    /// k >= 1 and A(dst) - k < A(src).
    Diagonal,
}

/// A validated model knot Floer complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelComplex {
    name: String,
    gens: Vec<Generator>,
    arrows: Vec<Arrow>,
}

impl ModelComplex {
    /// Build and validate.
    pub fn new(name: &str, gens: Vec<Generator>, mut arrows: Vec<Arrow>) -> Result<ModelComplex> {
        arrows.sort();
        let c = ModelComplex {
            name: name.to_string(),
            gens,
            arrows,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn classify(&self, a: &Arrow) -> ArrowClass {
        if a.upower == 0 {
            ArrowClass::Vertical
        } else if self.gens[a.dst].alexander - a.upower as i64 == self.gens[a.src].alexander {
            ArrowClass::Horizontal
        } else {
            ArrowClass::Diagonal
        }
    }

    /// Seifert genus bound: the largest Alexander grading.
    pub fn genus(&self) -> i64 {
        self.gens.iter().map(|g| g.alexander).max().unwrap_or(0)
    }

    /// Check all structural invariants; errors describe every violation found.
    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = vec![];
        if self.gens.is_empty() {
            problems.push("complex has no generators".into());
        }
        if self.gens.len() % 2 == 0 {
            problems.push(format!(
                "generator count must be odd, got {}",
                self.gens.len()
            ));
        }
        let mut seen = BTreeMap::new();
        for (i, g) in self.gens.iter().enumerate() {
            if let Some(j) = seen.insert(g.name.clone(), i) {
                problems.push(format!(
                    "duplicate generator name '{}' (positions {} and {})",
                    g.name, j, i
                ));
            }
        }
        let mut arrow_seen = BTreeMap::new();
        for a in &self.arrows {
            if a.src >= self.gens.len() || a.dst >= self.gens.len() {
                problems.push(format!("arrow with out-of-range generator index {:?}", a));
                continue;
            }
            if arrow_seen.insert((a.src, a.dst, a.upower), ()).is_some() {
                problems.push(format!(
                    "duplicate arrow {} -> U^{} {}",
                    self.gens[a.src].name, a.upower, self.gens[a.dst].name
                ));
            }
            let (s, d) = (&self.gens[a.src], &self.gens[a.dst]);
            let k = a.upower as i64;
            if s.maslov - d.maslov != 1 - 2 * k {
                problems.push(format!(
                    "arrow {} -> U^{} {}: Maslov drop must be 1 - 2k, got M({}) - M({}) = {}",
                    s.name,
                    k,
                    d.name,
                    s.name,
                    d.name,
                    s.maslov - d.maslov
                ));
            }
            if d.alexander - k > s.alexander {
                problems.push(format!(
                    "arrow {} -> U^{} {}: Alexander filtration violated (A(dst) - k = {} > {} = A(src))",
                    s.name,
                    k,
                    d.name,
                    d.alexander - k,
                    s.alexander
                ));
            }
            if k == 0 && d.alexander >= s.alexander {
                problems.push(format!(
                    "arrow {} -> {}: U^0 arrows must strictly drop A (complex must be reduced)",
                    s.name, d.name
                ));
            }
        }
        // d^2 = 0 over F2[U]: count U-power-resolved two-step paths mod 2.
        let mut square: BTreeMap<(usize, usize, u32), u32> = BTreeMap::new();
        for a in &self.arrows {
            for b in &self.arrows {
                if a.dst == b.src {
                    *square
                        .entry((a.src, b.dst, a.upower + b.upower))
                        .or_insert(0) += 1;
                }
            }
        }
        for ((s, d, k), count) in square {
            if count % 2 != 0 {
                problems.push(format!(
                    "d^2 != 0: term {} -> U^{} {} appears {} times",
                    self.gens[s].name, k, self.gens[d].name, count
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CfError::Parameter(format!(
                "invalid model complex '{}':\n  {}",
                self.name,
                problems.join("\n  ")
            )))
        }
    }

    /// The mirror complex: arrows reversed (same U-power), gradings negated.
    pub fn mirror(&self) -> ModelComplex {
        let gens = self
            .gens
            .iter()
            .map(|g| Generator {
                name: g.name.clone(),
                alexander: -g.alexander,
                maslov: -g.maslov,
            })
            .collect();
        let mut arrows: Vec<Arrow> = self
            .arrows
            .iter()
            .map(|a| Arrow {
                src: a.dst,
                dst: a.src,
                upower: a.upower,
            })
            .collect();
        arrows.sort();
        let c = ModelComplex {
            name: format!("mirror({})", self.name),
            gens,
            arrows,
        };
        debug_assert!(c.validate().is_ok());
        c
    }

    /// Euler characteristic polynomial sum (-1)^M t^A over generators.
    /// For a reduced complex this is the Alexander polynomial.
    pub fn alexander_polynomial(&self) -> Laurent {
        let mut p = Laurent::zero();
        for g in &self.gens {
            let sign = if g.maslov.rem_euclid(2) == 0 { 1 } else { -1 };
            p = p.add(&Laurent::monomial(sign, g.alexander));
        }
        p
    }
}

impl fmt::Display for ModelComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

impl ModelComplex {
    /// Parse the plain text complex format:
    ///
    /// ```text
    /// cfk v1
    /// # optional comment
    /// gen x1 A=1 M=0
    /// gen x2 A=0 M=-1
    /// gen x3 A=-1 M=-2
    /// arrow x2 x3 U=0
    /// arrow x2 x1 U=1
    /// ```
    pub fn from_text(name: &str, text: &str) -> Result<ModelComplex> {
        let mut lines = text.lines().enumerate();
        // Header: first non-blank, non-comment line.
        let header = loop {
            match lines.next() {
                None => {
                    return Err(CfError::Parse {
                        line: 1,
                        col: 1,
                        msg: "empty input; expected header 'cfk v1'".into(),
                    })
                }
                Some((ln, raw)) => {
                    let t = strip_comment(raw).trim();
                    if !t.is_empty() {
                        break (ln, t.to_string());
                    }
                }
            }
        };
        if header.1 != "cfk v1" {
            return Err(CfError::Parse {
                line: header.0 + 1,
                col: 1,
                msg: format!("expected header 'cfk v1', found '{}'", header.1),
            });
        }

        let mut gens: Vec<Generator> = vec![];
        let mut raw_arrows: Vec<(usize, String, String, u32)> = vec![];
        for (ln, raw) in lines {
            let line_no = ln + 1;
            let t = strip_comment(raw);
            if t.trim().is_empty() {
                continue;
            }
            let col_of = |tok: &str| raw.find(tok).map(|c| c + 1).unwrap_or(1);
            let toks: Vec<&str> = t.split_whitespace().collect();
            match toks[0] {
                "gen" => {
                    if toks.len() != 4 {
                        return Err(CfError::Parse {
                            line: line_no,
                            col: 1,
                            msg: "expected 'gen <id> A=<int> M=<int>'".into(),
                        });
                    }
                    let id = toks[1];
                    check_id(id, line_no, col_of(id))?;
                    let a = parse_kv(toks[2], "A", line_no, col_of(toks[2]))?;
                    let m = parse_kv(toks[3], "M", line_no, col_of(toks[3]))?;
                    gens.push(Generator {
                        name: id.to_string(),
                        alexander: a,
                        maslov: m,
                    });
                }
                "arrow" => {
                    if toks.len() != 4 {
                        return Err(CfError::Parse {
                            line: line_no,
                            col: 1,
                            msg: "expected 'arrow <src> <dst> U=<uint>'".into(),
                        });
                    }
                    check_id(toks[1], line_no, col_of(toks[1]))?;
                    check_id(toks[2], line_no, col_of(toks[2]))?;
                    let u = parse_kv(toks[3], "U", line_no, col_of(toks[3]))?;
                    if u < 0 {
                        return Err(CfError::Parse {
                            line: line_no,
                            col: col_of(toks[3]),
                            msg: "U-power must be nonnegative".into(),
                        });
                    }
                    raw_arrows.push((line_no, toks[1].to_string(), toks[2].to_string(), u as u32));
                }
                other => {
                    return Err(CfError::Parse {
                        line: line_no,
                        col: col_of(other),
                        msg: format!("unknown directive '{}' (expected 'gen' or 'arrow')", other),
                    })
                }
            }
        }

        let index: BTreeMap<&str, usize> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect();
        let mut arrows = vec![];
        for (line_no, s, d, u) in &raw_arrows {
            let src = *index.get(s.as_str()).ok_or(CfError::Parse {
                line: *line_no,
                col: 1,
                msg: format!("arrow references unknown generator '{}'", s),
            })?;
            let dst = *index.get(d.as_str()).ok_or(CfError::Parse {
                line: *line_no,
                col: 1,
                msg: format!("arrow references unknown generator '{}'", d),
            })?;
            arrows.push(Arrow {
                src,
                dst,
                upower: *u,
            });
        }
        drop(index);
        ModelComplex::new(name, gens, arrows)
    }

    /// Serialize in the text format parsed by `from_text`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("cfk v1\n");
        for g in &self.gens {
            out.push_str(&format!(
                "gen {} A={} M={}\n",
                g.name, g.alexander, g.maslov
            ));
        }
        for a in &self.arrows {
            out.push_str(&format!(
                "arrow {} {} U={}\n",
                self.gens[a.src].name, self.gens[a.dst].name, a.upower
            ));
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn check_id(id: &str, line: usize, col: usize) -> Result<()> {
    if !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Ok(())
    } else {
        Err(CfError::Parse {
            line,
            col,
            msg: format!("invalid identifier '{}' (use [A-Za-z0-9_]+)", id),
        })
    }
}

fn parse_kv(tok: &str, key: &str, line: usize, col: usize) -> Result<i64> {
    let prefix = format!("{}=", key);
    let rest = tok.strip_prefix(&prefix).ok_or_else(|| CfError::Parse {
        line,
        col,
        msg: format!("expected '{}=<int>', found '{}'", key, tok),
    })?;
    rest.parse::<i64>().map_err(|_| CfError::Parse {
        line,
        col,
        msg: format!("expected '{}=<int>', found '{}'", key, tok),
    })
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Names of the fixed catalog entries ("torus(a,b)" is additionally accepted).
pub fn catalog_names() -> &'static [(&'static str, &'static str)] {
    &[
        ("unknot", "one generator, no differential"),
        ("trefoil_rh", "right-handed trefoil staircase"),
        ("trefoil_lh", "left-handed trefoil (mirror staircase)"),
        (
            "figure_eight",
            "figure-eight knot: square plus central generator",
        ),
        ("torus(a,b)", "positive torus knot staircase, a, b >= 2 coprime"),
    ]
}

/// Look up a model complex by catalog name.
pub fn catalog(name: &str) -> Result<ModelComplex> {
    let g = |n: &str, a: i64, m: i64| Generator {
        name: n.to_string(),
        alexander: a,
        maslov: m,
    };
    match name {
        "unknot" => ModelComplex::new("unknot", vec![g("x1", 0, 0)], vec![]),
        "trefoil_rh" => ModelComplex::new(
            "trefoil_rh",
            vec![g("x1", 1, 0), g("x2", 0, -1), g("x3", -1, -2)],
            vec![
                Arrow {
                    src: 1,
                    dst: 2,
                    upower: 0,
                },
                Arrow {
                    src: 1,
                    dst: 0,
                    upower: 1,
                },
            ],
        ),
        "trefoil_lh" => ModelComplex::new(
            "trefoil_lh",
            vec![g("x1", -1, 0), g("x2", 0, 1), g("x3", 1, 2)],
            vec![
                Arrow {
                    src: 2,
                    dst: 1,
                    upower: 0,
                },
                Arrow {
                    src: 0,
                    dst: 1,
                    upower: 1,
                },
            ],
        ),
        "figure_eight" => ModelComplex::new(
            "figure_eight",
            vec![
                g("x1", 1, 1),
                g("x2", 0, 0),
                g("x3", 0, 0),
                g("x4", -1, -1),
                g("x5", 0, 0),
            ],
            vec![
                Arrow {
                    src: 0,
                    dst: 2,
                    upower: 0,
                },
                Arrow {
                    src: 1,
                    dst: 3,
                    upower: 0,
                },
                Arrow {
                    src: 1,
                    dst: 0,
                    upower: 1,
                },
                Arrow {
                    src: 3,
                    dst: 2,
                    upower: 1,
                },
            ],
        ),
        other => {
            if let Some(rest) = other.strip_prefix("torus(") {
                let inner = rest.strip_suffix(')').ok_or_else(|| {
                    CfError::Parameter(format!("malformed catalog name '{}'", other))
                })?;
                let parts: Vec<&str> = inner.split(',').map(|s| s.trim()).collect();
                if parts.len() != 2 {
                    return Err(CfError::Parameter(format!(
                        "malformed catalog name '{}': expected torus(a,b)",
                        other
                    )));
                }
                let a: i64 = parts[0].parse().map_err(|_| {
                    CfError::Parameter(format!(
                        "torus parameter '{}' is not an integer",
                        parts[0]
                    ))
                })?;
                let b: i64 = parts[1].parse().map_err(|_| {
                    CfError::Parameter(format!(
                        "torus parameter '{}' is not an integer",
                        parts[1]
                    ))
                })?;
                torus_staircase(a, b)
            } else {
                Err(CfError::Parameter(format!(
                    "unknown catalog entry '{}'; known: unknot, trefoil_rh, trefoil_lh, figure_eight, torus(a,b)",
                    other
                )))
            }
        }
    }
}

/// Staircase complex of the positive (a, b) torus knot.
pub fn torus_staircase(a: i64, b: i64) -> Result<ModelComplex> {
    if a < 2 || b < 2 || gcd(a, b) != 1 {
        return Err(CfError::Parameter(format!(
            "torus knot parameters must be coprime and at least 2: got ({}, {})",
            a, b
        )));
    }
    let delta = torus_alexander(a, b)?;
    staircase_from_alexander(&format!("torus({},{})", a, b), &delta)
}

/// Build the staircase complex of an L-space knot from its Alexander
/// polynomial, which must have alternating coefficients +1, -1, ..., +1 with
/// an odd number of terms, symmetric exponents, and leading coefficient +1.
///
/// Generators s0, ..., s2n get the term exponents as Alexander gradings in
/// descending order; each odd generator has a vertical arrow to the next
/// generator and a horizontal arrow to the previous one; Maslov gradings are
/// propagated from M(s0) = 0 by the arrow constraints.
pub fn staircase_from_alexander(name: &str, delta: &Laurent) -> Result<ModelComplex> {
    let mut terms = delta.terms();
    terms.reverse(); // descending exponent
    if terms.is_empty() || terms.len() % 2 == 0 {
        return Err(CfError::Parameter(format!(
            "not a staircase Alexander polynomial (needs an odd number of terms): {}",
            delta
        )));
    }
    for (idx, (c, _)) in terms.iter().enumerate() {
        let expect = if idx % 2 == 0 { 1 } else { -1 };
        if *c != expect {
            return Err(CfError::Parameter(format!(
                "not a staircase Alexander polynomial (coefficients must alternate +1/-1 from the top): {}",
                delta
            )));
        }
    }
    if !delta.is_symmetric() {
        return Err(CfError::Parameter(format!(
            "not a staircase Alexander polynomial (must be symmetric): {}",
            delta
        )));
    }

    let exps: Vec<i64> = terms.iter().map(|&(_, e)| e).collect();
    let n = exps.len();
    let mut maslov = vec![0i64; n];
    for i in 1..n {
        if i % 2 == 1 {
            // Horizontal arrow s_i -> U^k s_(i-1): M(s_i) = M(s_(i-1)) + 1 - 2k.
            let k = exps[i - 1] - exps[i];
            maslov[i] = maslov[i - 1] + 1 - 2 * k;
        } else {
            // Vertical arrow s_(i-1) -> s_i: M drops by 1.
            maslov[i] = maslov[i - 1] - 1;
        }
    }
    let gens = exps
        .iter()
        .enumerate()
        .map(|(i, &e)| Generator {
            name: format!("s{}", i),
            alexander: e,
            maslov: maslov[i],
        })
        .collect();
    let mut arrows = vec![];
    for i in (1..n).step_by(2) {
        arrows.push(Arrow {
            src: i,
            dst: i + 1,
            upower: 0,
        });
        arrows.push(Arrow {
            src: i,
            dst: i - 1,
            upower: (exps[i - 1] - exps[i]) as u32,
        });
    }
    ModelComplex::new(name, gens, arrows)
}

// ---------------------------------------------------------------------------
// Simplification and pairing
// ---------------------------------------------------------------------------

/// The matching structure of a simplified complex.
///
/// Vertical arrows pair (src, dst) leaving exactly one generator `xi0`
/// unpaired; horizontal arrows pair (src, dst, k) leaving exactly one
/// generator `eta0` unpaired. Diagonal arrows are collected separately;
/// downstream constructions refuse complexes that have any.
#[derive(Debug, Clone)]
pub struct Pairing {
    pub vertical: Vec<(usize, usize)>,
    pub horizontal: Vec<(usize, usize, u32)>,
    pub xi0: usize,
    pub eta0: usize,
    pub diagonals: Vec<Arrow>,
}

impl ModelComplex {
    /// Extract the vertical/horizontal matching; errors if the complex is not
    /// in simplified form (run `simplify` first).
    pub fn pairing(&self) -> Result<Pairing> {
        let n = self.gens.len();
        let mut vertical = vec![];
        let mut horizontal = vec![];
        let mut diagonals = vec![];
        let mut vert_seen = vec![0usize; n];
        let mut horiz_seen = vec![0usize; n];
        for a in &self.arrows {
            match self.classify(a) {
                ArrowClass::Vertical => {
                    vertical.push((a.src, a.dst));
                    vert_seen[a.src] += 1;
                    vert_seen[a.dst] += 1;
                }
                ArrowClass::Horizontal => {
                    horizontal.push((a.src, a.dst, a.upower));
                    horiz_seen[a.src] += 1;
                    horiz_seen[a.dst] += 1;
                }
                ArrowClass::Diagonal => diagonals.push(*a),
            }
        }
        let mut problems = vec![];
        for (i, g) in self.gens.iter().enumerate() {
            if vert_seen[i] > 1 {
                problems.push(format!(
                    "generator {} lies in {} vertical arrows (needs at most 1)",
                    g.name, vert_seen[i]
                ));
            }
            if horiz_seen[i] > 1 {
                problems.push(format!(
                    "generator {} lies in {} horizontal arrows (needs at most 1)",
                    g.name, horiz_seen[i]
                ));
            }
        }
        let vfree: Vec<usize> = (0..n).filter(|&i| vert_seen[i] == 0).collect();
        let hfree: Vec<usize> = (0..n).filter(|&i| horiz_seen[i] == 0).collect();
        if vfree.len() != 1 {
            problems.push(format!(
                "expected exactly one vertically unpaired generator, found {}",
                vfree.len()
            ));
        }
        if hfree.len() != 1 {
            problems.push(format!(
                "expected exactly one horizontally unpaired generator, found {}",
                hfree.len()
            ));
        }
        if !problems.is_empty() {
            return Err(CfError::Parameter(format!(
                "complex '{}' is not in simplified form:\n  {}",
                self.name,
                problems.join("\n  ")
            )));
        }
        let xi0 = vfree[0];
        let eta0 = hfree[0];
        if self.gens[xi0].maslov != 0 {
            return Err(CfError::Parameter(format!(
                "vertical homology generator {} must have Maslov grading 0, has {}",
                self.gens[xi0].name, self.gens[xi0].maslov
            )));
        }
        Ok(Pairing {
            vertical,
            horizontal,
            xi0,
            eta0,
            diagonals,
        })
    }

    /// Best-effort change of basis so that vertical and horizontal arrows
    /// each form matchings. Uses filtered substitutions y -> y + U^d z
    /// (legal when A(z) - d <= A(y) and M(z) - 2d = M(y)); merges two
    /// same-class arrows sharing a source or a target into one. Errors with
    /// the list of remaining obstructions if no matching basis is reached
    /// within the round cap.
    pub fn simplify(&self) -> Result<ModelComplex> {
        let n = self.gens.len();
        // Differential as an F2 term set (src, dst, k) with parity.
        let mut terms: BTreeMap<(usize, usize, u32), bool> = BTreeMap::new();
        for a in &self.arrows {
            *terms.entry((a.src, a.dst, a.upower)).or_insert(false) ^= true;
        }
        let gens = self.gens.clone();
        let class_of = |src: usize, dst: usize, k: u32| -> ArrowClass {
            if k == 0 {
                ArrowClass::Vertical
            } else if gens[dst].alexander - k as i64 == gens[src].alexander {
                ArrowClass::Horizontal
            } else {
                ArrowClass::Diagonal
            }
        };

        let cap = n * n + 8;
        for _round in 0..cap {
            let live: Vec<(usize, usize, u32)> = terms
                .iter()
                .filter(|(_, &on)| on)
                .map(|(&t, _)| t)
                .collect();

            // Find the first in-class multiplicity violation, deterministically.
            let mut merge: Option<((usize, usize, u32), (usize, usize, u32))> = None;
            'scan: for class in [ArrowClass::Vertical, ArrowClass::Horizontal] {
                for v in 0..n {
                    let outs: Vec<_> = live
                        .iter()
                        .filter(|&&(s, d, k)| s == v && class_of(s, d, k) == class)
                        .copied()
                        .collect();
                    if outs.len() >= 2 {
                        merge = Some((outs[0], outs[1]));
                        break 'scan;
                    }
                }
                for y in 0..n {
                    let ins: Vec<_> = live
                        .iter()
                        .filter(|&&(s, d, k)| d == y && class_of(s, d, k) == class)
                        .copied()
                        .collect();
                    if ins.len() >= 2 {
                        merge = Some((ins[0], ins[1]));
                        break 'scan;
                    }
                }
            }

            let Some((t1, t2)) = merge else { break };

            // Decide the substitution: replace basis vector `rep` by
            // rep + U^d other.
            let (rep, other, d) = if t1.0 == t2.0 {
                // Shared source v -> U^k1 y1, v -> U^k2 y2 with k1 <= k2:
                // replace y1 by y1 + U^(k2-k1) y2.
                let (a1, a2) = if t1.2 <= t2.2 { (t1, t2) } else { (t2, t1) };
                let (y1, k1) = (a1.1, a1.2);
                let (y2, k2) = (a2.1, a2.2);
                if k1 == k2 {
                    // d = 0 needs A(other) <= A(rep): substitute into max A.
                    if gens[y2].alexander <= gens[y1].alexander {
                        (y1, y2, 0u32)
                    } else {
                        (y2, y1, 0u32)
                    }
                } else {
                    (y1, y2, k2 - k1)
                }
            } else {
                // Shared target: v1 -> U^k1 y, v2 -> U^k2 y with k1 >= k2:
                // replace v1 by v1 + U^(k1-k2) v2; the U^k1 y terms cancel.
                let (a1, a2) = if t1.2 >= t2.2 { (t1, t2) } else { (t2, t1) };
                let (v1, k1) = (a1.0, a1.2);
                let (v2, k2) = (a2.0, a2.2);
                if k1 == k2 {
                    if gens[v2].alexander <= gens[v1].alexander {
                        (v1, v2, 0u32)
                    } else {
                        (v2, v1, 0u32)
                    }
                } else {
                    (v1, v2, k1 - k2)
                }
            };

            // Legality check: holds by construction for in-class merges, but
            // verify rather than assume.
            let legal = gens[other].alexander - d as i64 <= gens[rep].alexander
                && gens[other].maslov - 2 * d as i64 == gens[rep].maslov;
            if !legal {
                return Err(CfError::Parameter(format!(
                    "complex '{}': cannot simplify; substitution {} -> {} + U^{} {} is not filtered-legal",
                    self.name, gens[rep].name, gens[rep].name, d, gens[other].name
                )));
            }

            // Apply the basis change rep_new = rep + U^d other in two passes:
            // first rewrite rows (d(rep_new) = d(rep) + U^d d(other)), then
            // rewrite targets (terms into rep become terms into rep_new plus
            // U^d terms into other, since rep_old = rep_new + U^d other).
            let mut pass1: Vec<((usize, usize, u32), bool)> = vec![];
            {
                let mut acc: BTreeMap<(usize, usize, u32), bool> = BTreeMap::new();
                let mut toggle = |key: (usize, usize, u32)| {
                    *acc.entry(key).or_insert(false) ^= true;
                };
                for (&(s, dst, k), &on) in terms.iter() {
                    if !on {
                        continue;
                    }
                    toggle((s, dst, k));
                    if s == other {
                        toggle((rep, dst, k + d));
                    }
                }
                pass1.extend(acc.into_iter());
            }
            let mut next: BTreeMap<(usize, usize, u32), bool> = BTreeMap::new();
            {
                let mut toggle = |key: (usize, usize, u32)| {
                    *next.entry(key).or_insert(false) ^= true;
                };
                for ((s, dst, k), on) in pass1 {
                    if !on {
                        continue;
                    }
                    if dst == rep {
                        toggle((s, rep, k));
                        toggle((s, other, k + d));
                    } else {
                        toggle((s, dst, k));
                    }
                }
            }
            terms = next;
        }

        let arrows: Vec<Arrow> = terms
            .iter()
            .filter(|(_, &on)| on)
            .map(|(&(s, d, k), _)| Arrow {
                src: s,
                dst: d,
                upower: k,
            })
            .collect();
        let simplified = ModelComplex::new(&self.name, gens, arrows)?;
        // Confirm the matchings exist; report obstructions otherwise.
        simplified.pairing()?;
        Ok(simplified)
    }
}

// ---------------------------------------------------------------------------
// Concordance invariants: tau, nu, epsilon
// ---------------------------------------------------------------------------

impl ModelComplex {
    /// tau: the Alexander grading of the generator of the vertical homology.
    /// Requires the complex to be simplified (vertical matching).
    pub fn tau(&self) -> Result<i64> {
        let p = self.pairing()?;
        Ok(self.gens[p.xi0].alexander)
    }

    /// Independent route to tau: minimize the top Alexander grading over all
    /// representatives of the vertical homology class, by greedy reduction
    /// against an echelonized boundary space ordered by (A, index) descending.
    pub fn tau_oracle(&self) -> Result<i64> {
        let p = self.pairing()?;
        let n = self.gens.len();
        // Order generators descending by (A, index): slot 0 = largest A.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (-self.gens[i].alexander, i));
        let slot_of: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(s, &g)| (g, s)).collect();

        // Vertical boundary vectors in slot coordinates.
        let mut boundaries = Echelon::new();
        for a in &self.arrows {
            if a.upower == 0 {
                boundaries.insert(BitVec::from_indices(n, &[slot_of[&a.dst]]));
            }
        }
        // Greedy reduction: the echelon reduce cancels the leading
        // (lowest-slot = highest-A) entry whenever a pivot matches, which
        // exactly minimizes the top A over the affine class.
        let v = BitVec::from_indices(n, &[slot_of[&p.xi0]]);
        let r = boundaries.reduce(v);
        let lead = r
            .lowest_one()
            .ok_or_else(|| CfError::Internal("vertical class reduced to zero".into()))?;
        Ok(self.gens[order[lead]].alexander)
    }

    /// nu: the smallest s for which the projection from the hook subquotient
    /// at level s to the vertical complex hits the vertical homology class.
    ///
    /// The subquotient at level s has basis e_x = U^(a_x) x with
    /// a_x = max(A(x) - s, 0); a differential term x -> U^k y survives as
    /// e_x -> e_y exactly when a_x + k = a_y; the projection kills e_x with
    /// a_x > 0.
    pub fn nu(&self) -> Result<i64> {
        // Pairing certifies the complex is simplified with a well-defined
        // vertical homology generator.
        self.pairing()?;
        let n = self.gens.len();
        let g = self.genus();

        // Vertical boundary space (targets of U^0 arrows).
        let mut bvert = Echelon::new();
        for a in &self.arrows {
            if a.upower == 0 {
                let mut v = BitVec::zeros(n);
                v.flip(a.dst);
                bvert.insert(v);
            }
        }

        for s in (-g - 1)..=(g + 2) {
            let a_of = |x: usize| (self.gens[x].alexander - s).max(0) as u32;
            // Columns of the subquotient differential.
            let mut cols = vec![BitVec::zeros(n); n];
            for a in &self.arrows {
                if a_of(a.src) + a.upower == a_of(a.dst) {
                    cols[a.src].flip(a.dst);
                }
            }
            let cycles = kernel_basis(&cols);
            // Does some cycle project outside the vertical boundary space?
            // The vertical homology is one-dimensional, so nonzero in
            // homology means the class of xi0.
            let mut span = bvert.clone();
            let mut hits = false;
            for z in &cycles {
                let mut proj = BitVec::zeros(n);
                for x in z.ones() {
                    if a_of(x) == 0 {
                        proj.flip(x);
                    }
                }
                if span.insert(proj) {
                    hits = true;
                    break;
                }
            }
            if hits {
                return Ok(s);
            }
        }
        Err(CfError::Internal(format!(
            "nu scan failed for '{}': projection never surjective",
            self.name
        )))
    }

    /// epsilon in {-1, 0, 1} from the nu invariants of the complex and its
    /// mirror: epsilon = -1 when nu = tau + 1, epsilon = +1 when the mirror
    /// has nu = tau + 1, and 0 when both equal their tau.
    pub fn epsilon(&self) -> Result<i8> {
        let tau = self.tau()?;
        let nu = self.nu()?;
        let m = self.mirror();
        let mtau = m.tau()?;
        let mnu = m.nu()?;
        let here = nu == tau + 1;
        let there = mnu == mtau + 1;
        match (here, there) {
            (true, false) => Ok(-1),
            (false, true) => Ok(1),
            (false, false) => Ok(0),
            (true, true) => Err(CfError::Internal(format!(
                "epsilon contradiction for '{}': nu = tau + 1 on both sides",
                self.name
            ))),
        }
    }

    /// Structural route to epsilon: the position of the vertically unpaired
    /// generator xi0 within the horizontal matching. Horizontal target
    /// means +1, horizontal source means -1, eta0 itself means 0.
    pub fn epsilon_structural(&self) -> Result<i8> {
        let p = self.pairing()?;
        if p.xi0 == p.eta0 {
            return Ok(0);
        }
        for &(s, d, _) in &p.horizontal {
            if d == p.xi0 {
                return Ok(1);
            }
            if s == p.xi0 {
                return Ok(-1);
            }
        }
        Err(CfError::Internal(format!(
            "xi0 is neither eta0 nor in a horizontal pair in '{}'",
            self.name
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_catalog() -> Vec<ModelComplex> {
        vec![
            catalog("unknot").unwrap(),
            catalog("trefoil_rh").unwrap(),
            catalog("trefoil_lh").unwrap(),
            catalog("figure_eight").unwrap(),
            catalog("torus(5,3)").unwrap(),
        ]
    }

    #[test]
    fn catalog_entries_validate() {
        for c in all_catalog() {
            c.validate().unwrap();
            // Catalog entries are already simplified.
            let s = c.simplify().unwrap();
            assert_eq!(s, c, "{} should be a simplification fixed point", c.name());
        }
    }

    #[test]
    fn torus_5_3_staircase_frozen() {
        let c = catalog("torus(5,3)").unwrap();
        let want_a = [4, 3, 1, 0, -1, -3, -4];
        let want_m = [0, -1, -2, -3, -4, -7, -8];
        assert_eq!(c.num_gens(), 7);
        for (i, g) in c.gens().iter().enumerate() {
            assert_eq!(g.alexander, want_a[i], "A of s{}", i);
            assert_eq!(g.maslov, want_m[i], "M of s{}", i);
        }
        assert_eq!(c.genus(), 4);
    }

    #[test]
    fn trefoil_matches_torus_3_2() {
        let t = catalog("trefoil_rh").unwrap();
        let s = catalog("torus(3,2)").unwrap();
        let ga: Vec<_> = t.gens().iter().map(|g| (g.alexander, g.maslov)).collect();
        let gb: Vec<_> = s.gens().iter().map(|g| (g.alexander, g.maslov)).collect();
        assert_eq!(ga, gb);
        assert_eq!(t.arrows(), s.arrows());
    }

    #[test]
    fn mirror_is_involution_and_flips_tau() {
        for c in all_catalog() {
            let m = c.mirror();
            m.validate().unwrap();
            let mm = m.mirror();
            for (a, b) in c.gens().iter().zip(mm.gens().iter()) {
                assert_eq!((a.alexander, a.maslov), (b.alexander, b.maslov));
            }
            assert_eq!(c.arrows(), mm.arrows());
            assert_eq!(c.tau().unwrap(), -m.tau().unwrap(), "{}", c.name());
        }
    }

    #[test]
    fn lh_trefoil_is_mirror_of_rh() {
        let rh = catalog("trefoil_rh").unwrap();
        let lh = catalog("trefoil_lh").unwrap();
        let m = rh.mirror();
        for (a, b) in lh.gens().iter().zip(m.gens().iter()) {
            assert_eq!((a.alexander, a.maslov), (b.alexander, b.maslov));
        }
        assert_eq!(lh.arrows(), m.arrows());
    }

    #[test]
    fn pairing_structure_frozen() {
        let t = catalog("trefoil_rh").unwrap();
        let p = t.pairing().unwrap();
        assert_eq!(p.vertical, vec![(1, 2)]); // x2 -> x3
        assert_eq!(p.horizontal, vec![(1, 0, 1)]); // x2 -> U x1
        assert_eq!(t.generator(p.xi0).name, "x1");
        assert_eq!(t.generator(p.eta0).name, "x3");
        assert!(p.diagonals.is_empty());

        let f = catalog("figure_eight").unwrap();
        let p = f.pairing().unwrap();
        assert_eq!(p.vertical.len(), 2);
        assert_eq!(p.horizontal.len(), 2);
        assert_eq!(f.generator(p.xi0).name, "x5");
        assert_eq!(p.xi0, p.eta0);
    }

    #[test]
    fn tau_nu_epsilon_frozen() {
        let cases = [
            ("unknot", 0, 0, 0i8),
            ("trefoil_rh", 1, 1, 1),
            ("trefoil_lh", -1, 0, -1),
            ("figure_eight", 0, 0, 0),
            ("torus(5,3)", 4, 4, 1),
            ("torus(5,2)", 2, 2, 1),
        ];
        for (name, tau, nu, eps) in cases {
            let c = catalog(name).unwrap();
            assert_eq!(c.tau().unwrap(), tau, "tau of {}", name);
            assert_eq!(c.tau_oracle().unwrap(), tau, "tau oracle of {}", name);
            assert_eq!(c.nu().unwrap(), nu, "nu of {}", name);
            assert_eq!(c.epsilon().unwrap(), eps, "epsilon of {}", name);
            assert_eq!(
                c.epsilon_structural().unwrap(),
                eps,
                "structural epsilon of {}",
                name
            );
        }
    }

    #[test]
    fn mirror_nu_values() {
        // nu of the mirror of a positive staircase is tau(mirror) + 1.
        let rh = catalog("trefoil_rh").unwrap().mirror();
        assert_eq!(rh.nu().unwrap(), 0); // tau = -1, nu = 0
        let t53 = catalog("torus(5,3)").unwrap().mirror();
        assert_eq!(t53.nu().unwrap(), -3); // tau = -4, nu = -3
    }

    #[test]
    fn alexander_polynomials() {
        let t = catalog("trefoil_rh").unwrap();
        assert_eq!(t.alexander_polynomial(), torus_alexander(3, 2).unwrap());
        let f = catalog("figure_eight").unwrap();
        assert_eq!(
            f.alexander_polynomial(),
            Laurent::from_terms(&[(-1, 1), (3, 0), (-1, -1)])
        );
        let s = catalog("torus(5,3)").unwrap();
        assert_eq!(s.alexander_polynomial(), torus_alexander(5, 3).unwrap());
        assert_eq!(s.alexander_polynomial().eval_one(), 1);
    }

    #[test]
    fn text_roundtrip() {
        for c in all_catalog() {
            let text = c.to_text();
            let back = ModelComplex::from_text(c.name(), &text).unwrap();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn parse_diagnostics() {
        let bad_header = ModelComplex::from_text("t", "cfk v2\n");
        match bad_header {
            Err(CfError::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error on line 1, got {:?}", other),
        }
        let bad_gen = ModelComplex::from_text("t", "cfk v1\ngen x$ A=0 M=0\n");
        match bad_gen {
            Err(CfError::Parse { line: 2, col, .. }) => assert_eq!(col, 5),
            other => panic!("expected parse error, got {:?}", other),
        }
        let unknown = ModelComplex::from_text("t", "cfk v1\ngen x A=0 M=0\narrow x y U=0\n");
        match unknown {
            Err(CfError::Parse { line: 3, .. }) => {}
            other => panic!("expected unknown-generator error, got {:?}", other),
        }
        let comment_ok =
            ModelComplex::from_text("t", "# leading comment\n\ncfk v1\ngen x A=0 M=0 # inline\n");
        assert!(comment_ok.is_ok());
    }

    #[test]
    fn validation_rejects_bad_complexes() {
        // Maslov drop wrong (0 instead of 1).
        let r = ModelComplex::from_text(
            "t",
            "cfk v1\ngen a A=1 M=0\ngen b A=0 M=0\ngen c A=-1 M=-1\narrow a b U=0\n",
        );
        assert!(r.is_err());
        // U^0 arrow that does not drop A.
        let r = ModelComplex::from_text(
            "t",
            "cfk v1\ngen a A=0 M=0\ngen b A=0 M=-1\ngen c A=1 M=3\narrow a b U=0\n",
        );
        assert!(r.is_err());
        // Even generator count.
        let r = ModelComplex::from_text(
            "t",
            "cfk v1\ngen a A=1 M=0\ngen b A=0 M=-1\narrow a b U=0\n",
        );
        assert!(r.is_err());
        // Filtration violated: a -> U^1 b with A(b) - 1 = 1 > -1 = A(a).
        let r = ModelComplex::from_text(
            "t",
            "cfk v1\ngen a A=-1 M=0\ngen b A=2 M=1\ngen c A=0 M=0\narrow a b U=1\n",
        );
        assert!(r.is_err(), "A(dst) - k > A(src) must be rejected");
        // d^2 != 0 over F2[U].
        let r = ModelComplex::from_text(
            "t",
            "cfk v1\ngen a A=2 M=0\ngen b A=1 M=-1\ngen c A=0 M=-2\narrow a b U=0\narrow b c U=0\n",
        );
        assert!(r.is_err(), "square of the differential must vanish");
    }

    #[test]
    fn simplify_recovers_figure_eight_shape() {
        // The figure-eight complex after the basis change x3 -> x3 + x2
        // (valid but no longer simplified: x1 has two vertical arrows).
        let messy = ModelComplex::from_text(
            "messy",
            "cfk v1\n\
             gen x1 A=1 M=1\n\
             gen x2 A=0 M=0\n\
             gen x3 A=0 M=0\n\
             gen x4 A=-1 M=-1\n\
             gen x5 A=0 M=0\n\
             arrow x1 x3 U=0\n\
             arrow x1 x2 U=0\n\
             arrow x3 x4 U=0\n\
             arrow x3 x1 U=1\n\
             arrow x2 x4 U=0\n\
             arrow x2 x1 U=1\n\
             arrow x4 x3 U=1\n\
             arrow x4 x2 U=1\n",
        )
        .unwrap();
        assert!(messy.pairing().is_err());
        let s = messy.simplify().unwrap();
        let p = s.pairing().unwrap();
        assert_eq!(p.vertical.len(), 2);
        assert_eq!(p.horizontal.len(), 2);
        assert_eq!(p.xi0, p.eta0);
        assert_eq!(s.generator(p.xi0).name, "x5");
        assert_eq!(s.tau().unwrap(), 0);
        assert_eq!(s.nu().unwrap(), 0);
        assert_eq!(s.epsilon().unwrap(), 0);
    }

    #[test]
    fn diagonal_arrows_are_reported() {
        // Two stacked squares joined by diagonal arrows (a2 -> U b4 and
        // a4 -> U^2 b3 make d^2 vanish), plus a central generator. The
        // matchings exist, and the two diagonals are reported.
        let c = ModelComplex::from_text(
            "thick",
            "cfk v1\n\
             gen a1 A=1 M=1\n\
             gen a2 A=0 M=0\n\
             gen a3 A=0 M=0\n\
             gen a4 A=-1 M=-1\n\
             gen b1 A=1 M=3\n\
             gen b2 A=0 M=2\n\
             gen b3 A=0 M=2\n\
             gen b4 A=-1 M=1\n\
             gen x5 A=0 M=0\n\
             arrow a1 a3 U=0\n\
             arrow a2 a4 U=0\n\
             arrow a2 a1 U=1\n\
             arrow a4 a3 U=1\n\
             arrow b1 b3 U=0\n\
             arrow b2 b4 U=0\n\
             arrow b2 b1 U=1\n\
             arrow b4 b3 U=1\n\
             arrow a2 b4 U=1\n\
             arrow a4 b3 U=2\n",
        )
        .unwrap();
        let p = c.pairing().unwrap();
        assert_eq!(p.vertical.len(), 4);
        assert_eq!(p.horizontal.len(), 4);
        assert_eq!(p.diagonals.len(), 2);
        assert_eq!(c.generator(p.xi0).name, "x5");
        assert_eq!(p.xi0, p.eta0);
    }
}
