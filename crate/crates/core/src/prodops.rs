//! Product-operator bookkeeping for effective pure state preparation.
//!
//! Diagonal deviation density operators are integer combinations of
//! `{I, Z}` tensor strings. Controlled-NOT and NOT operations map each
//! signed string to exactly one signed string, so a preparation
//! experiment is tracked exactly with integer coefficients, and a set of
//! experiments is checked by summing their outputs.
//!
//! Preparation sequences are written in time order: `"C51 C45 C24 N3"`
//! applies `C51` first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::circuits::{NativeOp, NativeSequence};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::sim::{self, Circuit, Operator, C64};

/// Spin count of the physical register.
pub const SPINS: usize = 5;

/// A tensor string over `{I, Z}`; bit `i - 1` set means `Z` on spin `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZString(u8);

impl ZString {
    pub fn from_mask(mask: u8) -> Self {
        Self(mask)
    }

    /// `Z` on a single spin.
    pub fn single(spin: usize) -> Self {
        Self(1 << (spin - 1))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn has_z(self, spin: usize) -> bool {
        self.0 >> (spin - 1) & 1 == 1
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Renders the string over `spins` positions, spin 1 first.
    pub fn render(self, spins: usize) -> String {
        (1..=spins)
            .map(|s| if self.has_z(s) { 'Z' } else { 'I' })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > SPINS {
            return Err(Error::InvalidToken {
                token: s.to_string(),
                position: 0,
            });
        }
        let mut mask = 0u8;
        for (k, c) in s.chars().enumerate() {
            match c {
                'Z' => mask |= 1 << k,
                'I' => {}
                _ => {
                    return Err(Error::InvalidToken {
                        token: s.to_string(),
                        position: k,
                    })
                }
            }
        }
        Ok(Self(mask))
    }
}

/// A signed `{I, Z}` string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZTerm {
    pub pattern: ZString,
    /// `+1` or `-1`.
    pub sign: i8,
}

impl ZTerm {
    pub fn new(pattern: ZString, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { pattern, sign }
    }

    /// The term after conjugation by `op`.
    ///
    /// `C_ij` (control `i`, target `j`) toggles `Z` on `i` exactly when the
    /// string has `Z` on `j`; `N_i` flips the sign when the string has `Z`
    /// on `i`. Phase gates have no effect on `Z` strings.
    pub fn conjugate(self, op: &NativeOp) -> Self {
        match *op {
            NativeOp::Cnot { control, target } => {
                let mut mask = self.pattern.0;
                if self.pattern.has_z(target) {
                    mask ^= 1 << (control - 1);
                }
                Self::new(ZString(mask), self.sign)
            }
            NativeOp::Not(q) => {
                let sign = if self.pattern.has_z(q) {
                    -self.sign
                } else {
                    self.sign
                };
                Self::new(self.pattern, sign)
            }
            NativeOp::Phase { .. } => self,
        }
    }
}

/// Free-function form of [`ZTerm::conjugate`].
pub fn conjugate(term: ZTerm, op: &NativeOp) -> ZTerm {
    term.conjugate(op)
}

/// Integer-weighted sum of `{I, Z}` strings on `spins` spins.
/// Zero coefficients and the identity string are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZTermSum {
    spins: usize,
    coeffs: BTreeMap<ZString, i64>,
}

impl ZTermSum {
    pub fn new(spins: usize) -> Self {
        Self {
            spins,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn add(&mut self, pattern: ZString, coeff: i64) {
        if pattern.is_identity() || coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry(pattern).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&pattern);
        }
    }

    pub fn add_term(&mut self, term: ZTerm) {
        self.add(term.pattern, term.sign as i64);
    }

    pub fn coefficient(&self, pattern: ZString) -> i64 {
        self.coeffs.get(&pattern).copied().unwrap_or(0)
    }

    /// Number of strings with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ZString, i64)> + '_ {
        self.coeffs.iter().map(|(p, c)| (*p, *c))
    }

    /// Expands the sum into unit-weight signed terms.
    pub fn terms(&self) -> Vec<ZTerm> {
        self.iter()
            .flat_map(|(p, c)| {
                let sign = c.signum() as i8;
                std::iter::repeat_n(ZTerm::new(p, sign), c.unsigned_abs() as usize)
            })
            .collect()
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add(p, -c);
        }
        out
    }

    /// Dense `2^n x 2^n` diagonal operator (`n = 5` only), with
    /// `Z = diag(1, -1)` and spin 1 on the most significant bit.
    pub fn dense(&self) -> Operator {
        assert_eq!(self.spins, SPINS, "dense form needs the full register");
        let mut m = Operator::zeros(sim::DIM, sim::DIM);
        for b in 0..sim::DIM {
            let v: i64 = self
                .iter()
                .map(|(p, c)| {
                    let odd = (1..=SPINS)
                        .filter(|&s| p.has_z(s) && sim::qubit_value(b, s) == 1)
                        .count()
                        % 2;
                    if odd == 1 {
                        -c
                    } else {
                        c
                    }
                })
                .sum();
            m[(b, b)] = C64::new(v as f64, 0.0);
        }
        m
    }
}

impl fmt::Display for ZTermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (k, (p, c)) in self.iter().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if k > 0 {
                "+"
            } else {
                ""
            };
            let sep = if k > 0 { " " } else { "" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sep}{sign}{}", p.render(self.spins))?;
            } else {
                write!(f, "{sep}{sign}{mag}{}", p.render(self.spins))?;
            }
        }
        Ok(())
    }
}

/// Thermal-equilibrium deviation: one `+Z` on each spin.
pub fn equilibrium_zsum_n(spins: usize) -> ZTermSum {
    let mut s = ZTermSum::new(spins);
    for i in 1..=spins {
        s.add(ZString::single(i), 1);
    }
    s
}

/// Effective pure target: every non-identity string with coefficient `+1`.
pub fn effective_pure_target_n(spins: usize) -> ZTermSum {
    let mut s = ZTermSum::new(spins);
    for mask in 1..(1u16 << spins) {
        s.add(ZString(mask as u8), 1);
    }
    s
}

pub fn equilibrium_zsum() -> ZTermSum {
    equilibrium_zsum_n(SPINS)
}

pub fn effective_pure_target() -> ZTermSum {
    effective_pure_target_n(SPINS)
}

/// A preparation sequence of `C_ij` and `N_i` operations in time order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PrepSequence {
    ops: Vec<NativeOp>,
}

impl PrepSequence {
    pub fn new(ops: Vec<NativeOp>) -> Result<Self> {
        let seq = NativeSequence::new(ops)?;
        if let Some(op) = seq
            .ops()
            .iter()
            .find(|op| matches!(op, NativeOp::Phase { .. }))
        {
            return Err(Error::NotAPrepOp(op.to_string()));
        }
        Ok(Self {
            ops: seq.ops().to_vec(),
        })
    }

    pub fn ops(&self) -> &[NativeOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Highest spin index the sequence touches (0 when empty).
    pub fn max_spin(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match *op {
                NativeOp::Cnot { control, target } => control.max(target),
                NativeOp::Not(q) => q,
                NativeOp::Phase {
                    control, target, ..
                } => control.max(target),
            })
            .max()
            .unwrap_or(0)
    }

    /// The sequence as a five-spin gate circuit (time order preserved).
    pub fn circuit(&self) -> Circuit {
        Circuit::from_ops(self.ops.iter().map(NativeOp::gate).collect()).expect("validated")
    }
}

impl FromStr for PrepSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let seq: NativeSequence = s.parse()?;
        Self::new(seq.ops().to_vec())
    }
}

impl fmt::Display for PrepSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.ops.iter().map(NativeOp::to_string).collect();
        f.write_str(&tokens.join(" "))
    }
}

/// Parses a list of sequences separated by `,` or `;`.
pub fn parse_prep_list(s: &str) -> Result<Vec<PrepSequence>> {
    s.split([',', ';'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// The nine sequences used in the five-spin experiment.
pub fn experimental_prep_sequences() -> Vec<PrepSequence> {
    parse_prep_list(
        "C51 C45 C24 N3, C14 C31 C53 N2, C54 C51 N2, C31 C43 C23 N5, C21 C52 C45 C34, \
         C53 C25 C12 N4, C12 C15 C13 C41, C32 C13 C25 N4, C35 C23 N1",
    )
    .expect("static sequences parse")
}

/// Conjugates every term of `sum` by each op of `seq` in time order.
pub fn apply_prep(seq: &PrepSequence, sum: &ZTermSum) -> Result<ZTermSum> {
    if seq.max_spin() > sum.spins() {
        return Err(Error::SpinCountOutOfRange(seq.max_spin()));
    }
    let mut out = ZTermSum::new(sum.spins());
    for term in sum.terms() {
        out.add_term(seq.ops.iter().fold(term, |t, op| t.conjugate(op)));
    }
    Ok(out)
}

/// Outcome of summing a set of preparation experiments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepReport {
    pub spins: usize,
    pub experiments: usize,
    /// Signed terms produced before cancellation.
    pub total_terms: usize,
    pub summed: ZTermSum,
    pub is_effective_pure: bool,
    /// `summed - target`.
    pub residual: ZTermSum,
    /// Number of `(+P, -P)` pairs that cancelled.
    pub cancelled_pairs: usize,
    /// Strings involved in at least one cancelling pair.
    pub cancelled_patterns: Vec<ZString>,
}

pub fn verify_prep_set(seqs: &[PrepSequence]) -> Result<PrepReport> {
    verify_prep_set_n(SPINS, seqs)
}

/// Sums the equilibrium images of `seqs` on an `spins`-spin system and
/// compares with the effective pure target.
pub fn verify_prep_set_n(spins: usize, seqs: &[PrepSequence]) -> Result<PrepReport> {
    if !(1..=SPINS).contains(&spins) {
        return Err(Error::SpinCountOutOfRange(spins));
    }
    let eq = equilibrium_zsum_n(spins);
    let mut summed = ZTermSum::new(spins);
    let mut plus: BTreeMap<ZString, usize> = BTreeMap::new();
    let mut minus: BTreeMap<ZString, usize> = BTreeMap::new();
    let mut total_terms = 0;
    for seq in seqs {
        let image = apply_prep(seq, &eq)?;
        for term in image.terms() {
            total_terms += 1;
            summed.add_term(term);
            let tally = if term.sign > 0 { &mut plus } else { &mut minus };
            *tally.entry(term.pattern).or_insert(0) += 1;
        }
    }
    let mut cancelled_pairs = 0;
    let mut cancelled_patterns = Vec::new();
    for (p, &np) in &plus {
        let pairs = np.min(minus.get(p).copied().unwrap_or(0));
        if pairs > 0 {
            cancelled_pairs += pairs;
            cancelled_patterns.push(*p);
        }
    }
    let target = effective_pure_target_n(spins);
    let residual = summed.difference(&target);
    Ok(PrepReport {
        spins,
        experiments: seqs.len(),
        total_terms,
        is_effective_pure: residual.is_empty(),
        summed,
        residual,
        cancelled_pairs,
        cancelled_patterns,
    })
}

/// Decomposes `U rho_eq U^dagger` into `{I, Z}` strings with dense 32x32
/// algebra, where `U` is the sequence's unitary and `rho_eq` the five-spin
/// equilibrium deviation. Fails if the result has off-diagonal content or
/// non-integer coefficients.
pub fn dense_prep_image(seq: &PrepSequence) -> Result<ZTermSum> {
    let u = seq.circuit().unitary()?;
    let rho = &u * equilibrium_zsum().dense() * u.adjoint();
    for r in 0..sim::DIM {
        for c in 0..sim::DIM {
            if r != c && rho[(r, c)].norm() != 0.0 {
                return Err(Error::InfeasibleInput(format!(
                    "conjugated operator has off-diagonal entry at ({r}, {c})"
                )));
            }
        }
    }
    let mut out = ZTermSum::new(SPINS);
    for mask in 1..(1u8 << SPINS) {
        let p = ZString(mask);
        let trace: f64 = (0..sim::DIM)
            .map(|b| {
                let odd = (1..=SPINS)
                    .filter(|&s| p.has_z(s) && sim::qubit_value(b, s) == 1)
                    .count()
                    % 2;
                let z = if odd == 1 { -1.0 } else { 1.0 };
                z * rho[(b, b)].re
            })
            .sum();
        let coeff = trace / sim::DIM as f64;
        if coeff.fract() != 0.0 {
            return Err(Error::InfeasibleInput(format!(
                "non-integer coefficient {coeff} for {}",
                p.render(SPINS)
            )));
        }
        out.add(p, coeff as i64);
    }
    Ok(out)
}

/// A basis of GF(2)^n stored as a set of nonzero vectors.
#[derive(Debug, Clone, Copy)]
struct Basis {
    /// Bit `v - 1` set for each member vector `v`.
    members: u32,
}

/// All unordered bases of GF(2)^n, in lexicographic order of their sorted
/// member lists.
fn enumerate_bases(n: usize) -> Vec<Basis> {
    fn rec(n: usize, start: u32, chosen: &mut Vec<u32>, span: &mut Vec<u32>, out: &mut Vec<Basis>) {
        if chosen.len() == n {
            out.push(Basis {
                members: chosen.iter().map(|v| 1u32 << (v - 1)).sum(),
            });
            return;
        }
        for v in start..(1u32 << n) {
            if span.contains(&v) {
                continue;
            }
            let before = span.len();
            let extra: Vec<u32> = span.iter().map(|s| s ^ v).collect();
            span.extend(extra);
            chosen.push(v);
            rec(n, v + 1, chosen, span, out);
            chosen.pop();
            span.truncate(before);
        }
    }
    let mut out = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut vec![0], &mut out);
    out
}

/// Search state: `defects` holds the nonzero vectors used an even number
/// of times so far; a schedule is complete when it is empty.
struct Search<'a> {
    n: usize,
    bases: &'a [Basis],
    lookup: HashMap<u32, usize>,
    /// Vectors of GF(2)^n minus zero, as bit positions.
    vectors: usize,
}

/// Children explored per node while more than three experiments remain.
const SCHEDULE_BRANCHING: usize = 6;
/// Children explored per node when exactly three experiments remain.
const SCHEDULE_ENDGAME_BRANCHING: usize = 256;

impl<'a> Search<'a> {
    fn new(n: usize, bases: &'a [Basis]) -> Self {
        let lookup = bases
            .iter()
            .enumerate()
            .map(|(k, b)| (b.members, k))
            .collect();
        Self {
            n,
            bases,
            lookup,
            vectors: (1 << n) - 1,
        }
    }

    fn feasible(&self, defects: u32, remaining: usize) -> bool {
        let d = defects.count_ones() as usize;
        d <= self.n * remaining && (d + self.n * remaining).is_multiple_of(2)
    }

    /// Bases that keep the search feasible, best first (fewest defects left),
    /// ties in enumeration order.
    fn candidates(&self, defects: u32, remaining: usize, limit: usize) -> Vec<usize> {
        let mut scored: Vec<(u32, usize)> = self
            .bases
            .iter()
            .enumerate()
            .filter_map(|(k, b)| {
                let next = defects ^ b.members;
                self.feasible(next, remaining - 1)
                    .then_some((next.count_ones(), k))
            })
            .collect();
        scored.sort_unstable();
        scored.truncate(limit);
        scored.into_iter().map(|(_, k)| k).collect()
    }

    /// Two bases whose symmetric difference is `defects`, found exactly.
    ///
    /// If `|defects| = 2a`, each basis takes `a` defects plus the same
    /// `n - a` shared vectors from outside the defect set.
    fn solve_pair(&self, defects: u32) -> Option<(usize, usize)> {
        let d = defects.count_ones() as usize;
        if d % 2 == 1 || d > 2 * self.n {
            return None;
        }
        let a = d / 2;
        let inside: Vec<u32> = bits(defects).collect();
        let all = ((1u64 << self.vectors) - 1) as u32;
        let outside: Vec<u32> = bits(all & !defects).collect();
        for half in combinations(&inside, a) {
            let first_part: u32 = half.iter().sum();
            // each split is visited twice; keep the one holding the lowest defect
            if a > 0 && first_part & inside[0] == 0 {
                continue;
            }
            let second_part = defects ^ first_part;
            for shared in combinations(&outside, self.n - a) {
                let s: u32 = shared.iter().sum();
                if let (Some(&x), Some(&y)) = (
                    self.lookup.get(&(first_part | s)),
                    self.lookup.get(&(second_part | s)),
                ) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    fn solve(&self, defects: u32, remaining: usize, path: &mut Vec<usize>) -> bool {
        if !self.feasible(defects, remaining) {
            return false;
        }
        match remaining {
            0 => defects == 0,
            1 => match self.lookup.get(&defects) {
                Some(&k) => {
                    path.push(k);
                    true
                }
                None => false,
            },
            2 => match self.solve_pair(defects) {
                Some((x, y)) => {
                    path.extend([x, y]);
                    true
                }
                None => false,
            },
            _ => {
                let limit = if remaining == 3 {
                    SCHEDULE_ENDGAME_BRANCHING
                } else {
                    SCHEDULE_BRANCHING
                };
                for k in self.candidates(defects, remaining, limit) {
                    path.push(k);
                    if self.solve(defects ^ self.bases[k].members, remaining - 1, path) {
                        return true;
                    }
                    path.pop();
                }
                false
            }
        }
    }
}

/// Single-bit masks of the set bits of `mask`, low to high.
fn bits(mask: u32) -> impl Iterator<Item = u32> {
    (0..32).map(|i| 1u32 << i).filter(move |b| mask & b != 0)
}

/// All `k`-element subsets of `items`, in lexicographic index order.
fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn rec(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Finds preparation sequences whose summed equilibrium images give the
/// `n`-spin effective pure target, using at most `max_experiments`.
///
/// Every vector of GF(2)^n must be produced an odd number of times, so the
/// search looks for bases whose symmetric difference is the full vector
/// set. The first experiment is fixed to the identity; intermediate levels
/// are explored greedily with bounded branching and the last two
/// experiments are solved exactly. Experiment counts are tried from
/// `ceil((2^n - 1) / n)` upward and the first success is returned, which is
/// not guaranteed to be optimal.
pub fn schedule_prep(
    n: usize,
    max_experiments: usize,
    exec: Execution,
) -> Result<Vec<PrepSequence>> {
    if !(1..=SPINS).contains(&n) {
        return Err(Error::SpinCountOutOfRange(n));
    }
    let bases = enumerate_bases(n);
    let search = Search::new(n, &bases);
    let identity_members: u32 = (0..n).map(|i| 1u32 << ((1u32 << i) - 1)).sum();
    let identity = search.lookup[&identity_members];
    let all_vectors = ((1u64 << search.vectors) - 1) as u32;
    let start = all_vectors ^ identity_members;
    let lower = search.vectors.div_ceil(n);
    for k in lower.max(1)..=max_experiments {
        if !search.feasible(start, k - 1) {
            continue;
        }
        let found = if k <= 3 {
            let mut path = Vec::new();
            search.solve(start, k - 1, &mut path).then_some(path)
        } else {
            // fan the second experiment out; first success in candidate order wins
            let limit = if k == 4 {
                SCHEDULE_ENDGAME_BRANCHING
            } else {
                SCHEDULE_BRANCHING
            };
            let firsts = search.candidates(start, k - 1, limit);
            exec::map(exec, &firsts, |&c| {
                let mut path = vec![c];
                search
                    .solve(start ^ bases[c].members, k - 2, &mut path)
                    .then_some(path)
            })
            .into_iter()
            .flatten()
            .next()
        };
        if let Some(rest) = found {
            let chosen: Vec<Basis> = std::iter::once(identity)
                .chain(rest)
                .map(|k| bases[k])
                .collect();
            let schedule = synthesize(n, &chosen);
            let report = verify_prep_set_n(n, &schedule)?;
            assert!(
                report.is_effective_pure,
                "synthesized schedule failed verification"
            );
            return Ok(schedule);
        }
    }
    Err(Error::SearchExhausted { max_experiments })
}

/// Turns a list of bases into C/N sequences, assigning signs so that each
/// vector used `t` times appears `(t + 1) / 2` times positive.
fn synthesize(n: usize, bases: &[Basis]) -> Vec<PrepSequence> {
    let mut uses = [0usize; 32];
    for b in bases {
        for v in 1..(1u32 << n) {
            if b.members >> (v - 1) & 1 == 1 {
                uses[v as usize] += 1;
            }
        }
    }
    let mut seen = [0usize; 32];
    bases
        .iter()
        .map(|b| {
            let vectors: Vec<u32> = (1..(1u32 << n))
                .filter(|v| b.members >> (v - 1) & 1 == 1)
                .collect();
            let negative: Vec<u32> = vectors
                .iter()
                .copied()
                .filter(|&v| {
                    seen[v as usize] += 1;
                    seen[v as usize] > uses[v as usize].div_ceil(2)
                })
                .collect();
            shortest_realization(n, &vectors, &negative)
        })
        .collect()
}

/// Among all assignments of equilibrium terms to `vectors`, the shortest
/// C/N sequence mapping `Z_k` onto its assigned vector, with `N` on the
/// spins whose terms must come out negative.
fn shortest_realization(n: usize, vectors: &[u32], negative: &[u32]) -> PrepSequence {
    let mut best: Option<PrepSequence> = None;
    for order in permutations(vectors) {
        let mut ops: Vec<NativeOp> = order
            .iter()
            .enumerate()
            .filter(|(_, v)| negative.contains(v))
            .map(|(k, _)| NativeOp::Not(k + 1))
            .collect();
        ops.extend(cnot_network(n, &order));
        if best.as_ref().is_none_or(|b| ops.len() < b.len()) {
            best = Some(PrepSequence::new(ops).expect("valid ops"));
        }
    }
    best.expect("at least one ordering")
}

/// C-ops (time order) whose conjugation maps `Z` on spin `k + 1` to the
/// string `columns[k]`.
fn cnot_network(n: usize, columns: &[u32]) -> Vec<NativeOp> {
    // rows[i] bit k = bit i of columns[k]
    let mut rows: Vec<u32> = (0..n)
        .map(|i| {
            columns
                .iter()
                .enumerate()
                .map(|(k, c)| ((c >> i) & 1) << k)
                .sum()
        })
        .collect();
    let mut elimination = Vec::new();
    let mut add = |rows: &mut Vec<u32>, dst: usize, src: usize| {
        rows[dst] ^= rows[src];
        elimination.push(NativeOp::Cnot {
            control: dst + 1,
            target: src + 1,
        });
    };
    for c in 0..n {
        if rows[c] >> c & 1 == 0 {
            let r = (c + 1..n)
                .find(|&r| rows[r] >> c & 1 == 1)
                .expect("columns are independent");
            add(&mut rows, c, r);
        }
        for r in 0..n {
            if r != c && rows[r] >> c & 1 == 1 {
                add(&mut rows, r, c);
            }
        }
    }
    elimination.reverse();
    elimination
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
