//! Permutations of `{0, 1, 2, 3}` and the controlled-power oracle
//! `|x>|y> -> |x>|pi^x(y)>`.
//!
//! Element `y = 2*y1 + y0` is stored with `y1` on qubit 4 and `y0` on
//! qubit 5. The exponent `x = 4*x2 + 2*x1 + x0` has `x2` on qubit 1,
//! `x1` on qubit 2 and `x0` on qubit 3.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sim::{Circuit, GateOp, Operator, C64};

/// Number of permuted elements.
pub const ELEMENTS: usize = 4;

/// A bijection on `{0, 1, 2, 3}`; `images[y] = pi(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: [u8; ELEMENTS],
}

impl Permutation {
    pub const IDENTITY: Permutation = Permutation {
        images: [0, 1, 2, 3],
    };

    pub fn from_images(images: [u8; ELEMENTS]) -> Result<Self> {
        let mut seen = [false; ELEMENTS];
        for &i in &images {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::InvalidPermutation(format!("image {i} out of range")))?;
            if *slot {
                return Err(Error::InvalidPermutation(format!("image {i} repeated")));
            }
            *slot = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1], &[2, 3]]`.
    pub fn from_cycles(cycles: &[&[u8]]) -> Result<Self> {
        let mut images = [0u8, 1, 2, 3];
        let mut used = [false; ELEMENTS];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let a_idx = a as usize;
                if a_idx >= ELEMENTS {
                    return Err(Error::InvalidPermutation(format!(
                        "element {a} out of range"
                    )));
                }
                if used[a_idx] {
                    return Err(Error::InvalidPermutation(format!(
                        "element {a} appears in more than one cycle position"
                    )));
                }
                used[a_idx] = true;
                images[a_idx] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    /// All 24 permutations in lexicographic order of their image lists.
    pub fn all() -> Vec<Permutation> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if let Ok(p) = Self::from_images([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn images(&self) -> [u8; ELEMENTS] {
        self.images
    }

    pub fn apply(&self, y: usize) -> usize {
        self.images[y] as usize
    }

    /// `(self . other)(y) = self(other(y))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.map(|y| self.images[y as usize]),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = [0u8; ELEMENTS];
        for (y, &img) in self.images.iter().enumerate() {
            images[img as usize] = y as u8;
        }
        Permutation { images }
    }

    /// `pi^k`; `pi^0` is the identity.
    pub fn power(&self, k: u64) -> Permutation {
        // every order divides 12
        (0..k % 12).fold(Self::IDENTITY, |acc, _| self.compose(&acc))
    }

    /// Smallest `r >= 1` with `pi^r(y) = y`.
    pub fn order_of(&self, y: usize) -> Result<usize> {
        check_element(y)?;
        let mut r = 1;
        let mut z = self.apply(y);
        while z != y {
            z = self.apply(z);
            r += 1;
        }
        Ok(r)
    }

    /// Disjoint cycles of length >= 2, each starting at its smallest element,
    /// ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let mut seen = [false; ELEMENTS];
        let mut out = Vec::new();
        for start in 0..ELEMENTS {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start as u8];
            seen[start] = true;
            let mut z = self.apply(start);
            while z != start {
                seen[z] = true;
                cycle.push(z as u8);
                z = self.apply(z);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// 4x4 permutation matrix `|y> -> |pi(y)>`.
    pub fn block(&self) -> [[C64; 4]; 4] {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for y in 0..ELEMENTS {
            m[self.apply(y)][y] = C64::new(1.0, 0.0);
        }
        m
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            let parts: Vec<String> = cycle.iter().map(u8::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts cycle notation (`"(0 1 2 3)"`, `"(0 1)(2 3)"`, `"()"`) or an
    /// image list (`"1,0,3,2"`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('(') {
            parse_cycles(s)
        } else {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            if parts.len() != ELEMENTS {
                return Err(Error::InvalidPermutation(format!(
                    "`{s}`: expected {ELEMENTS} comma-separated images"
                )));
            }
            let mut images = [0u8; ELEMENTS];
            for (slot, p) in images.iter_mut().zip(&parts) {
                *slot = p
                    .parse()
                    .map_err(|_| Error::InvalidPermutation(format!("`{s}`: bad image `{p}`")))?;
            }
            Self::from_images(images)
        }
    }
}

fn parse_cycles(s: &str) -> Result<Permutation> {
    let bad = |why: &str| Error::InvalidPermutation(format!("`{s}`: {why}"));
    let mut cycles: Vec<Vec<u8>> = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
        let close = open.find(')').ok_or_else(|| bad("unclosed `(`"))?;
        let body = &open[..close];
        let cycle = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u8>().map_err(|_| bad("bad element")))
            .collect::<Result<Vec<u8>>>()?;
        cycles.push(cycle);
        rest = open[close + 1..].trim_start();
    }
    let refs: Vec<&[u8]> = cycles.iter().map(Vec::as_slice).collect();
    Permutation::from_cycles(&refs).map_err(|e| bad(&e.to_string()))
}

pub(crate) fn check_element(y: usize) -> Result<()> {
    if y < ELEMENTS {
        Ok(())
    } else {
        Err(Error::ElementOutOfRange(y))
    }
}

/// A permutation together with the starting element fed to the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSpec {
    pub pi: Permutation,
    pub y: usize,
}

impl OracleSpec {
    pub fn new(pi: Permutation, y: usize) -> Result<Self> {
        check_element(y)?;
        Ok(Self { pi, y })
    }

    /// Order of `y` under `pi`.
    pub fn order(&self) -> usize {
        self.pi.order_of(self.y).expect("validated element")
    }

    /// Register input `|000>|y1 y0>`.
    pub fn initial_index(&self) -> usize {
        self.y
    }

    /// All 96 `(pi, y)` instances, permutations outermost.
    pub fn all() -> Vec<OracleSpec> {
        Permutation::all()
            .into_iter()
            .flat_map(|pi| (0..ELEMENTS).map(move |y| OracleSpec { pi, y }))
            .collect()
    }
}

/// Exponent-register qubit carrying bit `k` of `x` (`x0` on qubit 3).
pub fn exponent_qubit(bit: usize) -> usize {
    3 - bit
}

/// The three controlled stages: `pi` controlled by qubit 3, `pi^2` by qubit 2,
/// `pi^4` by qubit 1, each acting on qubits 4 and 5.
pub fn oracle_stages(pi: &Permutation) -> Vec<GateOp> {
    (0..3)
        .map(|bit| GateOp::ControlledTargetUnitary {
            control: exponent_qubit(bit),
            targets: [4, 5],
            block: pi.power(1 << bit).block(),
        })
        .collect()
}

/// `sum_x |x><x| (x) P_{pi^x}` assembled from [`oracle_stages`].
pub fn oracle_unitary(pi: &Permutation) -> Operator {
    Circuit::from_ops(oracle_stages(pi))
        .and_then(|c| c.unitary())
        .expect("permutation blocks are unitary")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(Permutation::IDENTITY.order_of(0).unwrap(), 1);
        assert_eq!(p("(0 1)(2 3)").order_of(2).unwrap(), 2);
        assert_eq!(p("(0 1 2)").order_of(3).unwrap(), 1);
        assert_eq!(p("(0 1 2)").order_of(0).unwrap(), 3);
        assert!(matches!(
            p("()").order_of(4),
            Err(Error::ElementOutOfRange(4))
        ));
    }

    #[test]
    fn power_examples() {
        assert_eq!(p("(0 1 2 3)").power(2), p("(0 2)(1 3)"));
        for pi in Permutation::all() {
            assert_eq!(pi.power(0), Permutation::IDENTITY);
            assert_eq!(pi.power(12), Permutation::IDENTITY);
            assert_eq!(pi.compose(&pi.inverse()), Permutation::IDENTITY);
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!(p("()"), Permutation::IDENTITY);
        assert_eq!(p("1,0,3,2"), p("(0 1)(2 3)"));
        assert_eq!(p(" (2 3)(0 1) "), p("(0 1)(2 3)"));
        assert_eq!(p("(0 1 2 3)").images(), [1, 2, 3, 0]);
        for bad in ["(0 1", "(0 4)", "(0 1)(1 2)", "1,1,2,3", "0,1,2", "x"] {
            assert!(bad.parse::<Permutation>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips_all() {
        let all = Permutation::all();
        assert_eq!(all.len(), 24);
        for pi in all {
            assert_eq!(pi.to_string().parse::<Permutation>().unwrap(), pi);
        }
        assert_eq!(p("(1 0)(3 2)").to_string(), "(0 1)(2 3)");
    }

    #[test]
    fn identity_oracle_is_identity() {
        let u = oracle_unitary(&Permutation::IDENTITY);
        assert_eq!(crate::sim::max_abs_diff(&u, &crate::sim::identity()), 0.0);
    }

    #[test]
    fn oracle_entries_form_a_permutation_matrix() {
        for pi in Permutation::all() {
            let u = oracle_unitary(&pi);
            for r in 0..32 {
                let row: Vec<f64> = (0..32).map(|c| u[(r, c)].norm()).collect();
                assert!(row.iter().all(|&v| v == 0.0 || v == 1.0));
                assert_eq!(row.iter().sum::<f64>(), 1.0);
            }
            assert!(crate::sim::unitarity_defect(&u) < 1e-12);
        }
    }
}
