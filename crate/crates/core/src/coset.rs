//! Todd–Coxeter coset enumeration.
//!
//! Enumeration follows the HLT strategy: every live coset, in order, has
//! each relator scanned and filled, then its remaining row entries defined.
//! Coincidences are processed through a union-find forest that always keeps
//! the smaller coset number as representative. Finished tables are
//! renumbered by breadth-first discovery from coset 0 along the positive
//! generators in declaration order, so equal subgroups always give
//! identical tables.
//!
//! Tables act on the right: coset `c` times letter `l` is `image(c, l)`.

use std::collections::VecDeque;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Letter, Word};

const NONE: u32 = u32::MAX;

/// Default ceiling on the number of cosets an enumeration may define.
pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Total cosets that may be defined, counting ones later found to coincide.
    pub max_cosets: usize,
    /// Number of relator scans allowed.
    pub max_deductions: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_cosets: DEFAULT_MAX_COSETS, max_deductions: 1 << 34 }
    }
}

impl EnumerationLimits {
    pub fn with_max_cosets(max_cosets: usize) -> Self {
        EnumerationLimits { max_cosets: max_cosets.max(1), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("coset enumeration exceeded {max_cosets} cosets; the index is infinite or larger than the limit")]
    CosetLimit { max_cosets: usize },
    #[error("coset enumeration exceeded {max_deductions} relator scans")]
    DeductionLimit { max_deductions: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("generator {0} does not act as a permutation")]
    NotAPermutation(usize),
    #[error("permutation {0} has the wrong degree")]
    WrongDegree(usize),
    #[error("action is not transitive from coset 0")]
    NotTransitive,
    #[error("a coset table needs at least one coset")]
    Empty,
}

/// A complete coset table: the permutation action of each generator on the
/// cosets of a subgroup, with coset 0 the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: Vec<String>,
    index: usize,
    // Row-major, `2 * generators.len()` columns indexed by `Letter::column`.
    cells: Vec<u32>,
}

impl CosetTable {
    /// Builds a table from forward permutations, one per generator. The
    /// points are renumbered canonically; the orbit of point 0 must be all
    /// points.
    pub fn from_permutations<S: AsRef<str>>(names: &[S], perms: &[Vec<u32>]) -> Result<Self, TableError> {
        let degree = perms.first().map_or(1, |p| p.len());
        if degree == 0 {
            return Err(TableError::Empty);
        }
        let ncols = 2 * perms.len();
        let mut cells = vec![NONE; degree * ncols];
        for (g, perm) in perms.iter().enumerate() {
            if perm.len() != degree {
                return Err(TableError::WrongDegree(g));
            }
            for (c, &img) in perm.iter().enumerate() {
                if img as usize >= degree || cells[img as usize * ncols + 2 * g + 1] != NONE {
                    return Err(TableError::NotAPermutation(g));
                }
                cells[c * ncols + 2 * g] = img;
                cells[img as usize * ncols + 2 * g + 1] = c as u32;
            }
        }
        let generators = names.iter().map(|s| s.as_ref().to_string()).collect();
        let live: Vec<bool> = vec![true; degree];
        let table = standardize(generators, ncols, &cells, &live);
        if table.index != degree {
            return Err(TableError::NotTransitive);
        }
        Ok(table)
    }

    /// The one-coset table of the whole group.
    pub fn trivial<S: AsRef<str>>(names: &[S]) -> Self {
        let perms: Vec<Vec<u32>> = names.iter().map(|_| vec![0]).collect();
        CosetTable::from_permutations(names, &perms).expect("trivial action is valid")
    }

    /// Number of cosets, `[G:H]`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generators
    }

    #[inline]
    pub fn image(&self, coset: usize, letter: Letter) -> usize {
        self.cells[coset * 2 * self.generators.len() + letter.column()] as usize
    }

    /// Forward permutation of generator `g`.
    pub fn permutation(&self, g: usize) -> Vec<u32> {
        (0..self.index).map(|c| self.image(c, Letter::positive(g)) as u32).collect()
    }

    /// Image of `start` under the word `w`.
    pub fn trace(&self, start: usize, w: &Word) -> usize {
        assert!(start < self.index, "coset {start} out of range");
        w.letters().iter().fold(start, |c, &l| self.image(c, l))
    }

    /// Length of the cycle of `w` through coset `start`.
    pub fn cycle_length(&self, start: usize, w: &Word) -> usize {
        let mut c = self.trace(start, w);
        let mut len = 1;
        while c != start {
            c = self.trace(c, w);
            len += 1;
        }
        len
    }

    /// Order of `w` as a permutation of all cosets.
    pub fn permutation_order(&self, w: &Word) -> u64 {
        let perm: Vec<usize> = (0..self.index).map(|c| self.trace(c, w)).collect();
        let mut seen = vec![false; self.index];
        let mut order: u64 = 1;
        for c in 0..self.index {
            if seen[c] {
                continue;
            }
            let mut len = 0u64;
            let mut x = c;
            while !seen[x] {
                seen[x] = true;
                x = perm[x];
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }

    /// True when every word fixes every coset.
    pub fn words_act_trivially(&self, words: &[Word]) -> bool {
        words.iter().all(|w| (0..self.index).all(|c| self.trace(c, w) == c))
    }

    /// Checks the table against a presentation and subgroup generators:
    /// relators act trivially everywhere and subgroup generators fix coset 0.
    pub fn verify(&self, pres: &Presentation, subgens: &[Word]) -> bool {
        self.generators.len() == pres.generator_count()
            && self.words_act_trivially(pres.relators())
            && subgens.iter().all(|h| self.trace(0, h) == 0)
    }
}

impl Serialize for CosetTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Action<'a>(&'a CosetTable);
        impl Serialize for Action<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.generators.len()))?;
                for (g, name) in self.0.generators.iter().enumerate() {
                    map.serialize_entry(name, &self.0.permutation(g))?;
                }
                map.end()
            }
        }
        let mut s = serializer.serialize_struct("CosetTable", 3)?;
        s.serialize_field("index", &self.index)?;
        s.serialize_field("generators", &self.generators)?;
        s.serialize_field("action", &Action(self))?;
        s.end()
    }
}

/// Enumerates the cosets of the subgroup generated by `subgens` in the
/// group presented by `pres`.
pub fn todd_coxeter(
    pres: &Presentation,
    subgens: &[Word],
    limits: EnumerationLimits,
) -> Result<CosetTable, EnumerationError> {
    let mut e = Enumerator::new(pres, limits);
    e.run(subgens)?;
    let table = e.finish(pres.generator_names());
    assert!(
        table.verify(pres, subgens),
        "coset enumeration produced a table violating a relator"
    );
    Ok(table)
}

/// Coset table of the normal closure of `closure_words`: the regular
/// representation of `G / <<closure_words>>`.
pub fn normal_closure_table(
    pres: &Presentation,
    closure_words: &[Word],
    limits: EnumerationLimits,
) -> Result<CosetTable, EnumerationError> {
    let quotient = pres.with_relators(closure_words.iter().cloned());
    todd_coxeter(&quotient, &[], limits)
}

/// True iff every subgroup generator fixes every coset, i.e. the subgroup is
/// the kernel of the action and hence normal.
pub fn is_normal(pres: &Presentation, table: &CosetTable, subgens: &[Word]) -> bool {
    assert_eq!(pres.generator_count(), table.generator_count());
    table.words_act_trivially(subgens)
}

struct Enumerator {
    ncols: usize,
    cells: Vec<u32>,
    parent: Vec<u32>,
    relators: Vec<Vec<u32>>,
    queue: Vec<u32>,
    limits: EnumerationLimits,
    scans: u64,
}

impl Enumerator {
    fn new(pres: &Presentation, limits: EnumerationLimits) -> Self {
        let ncols = 2 * pres.generator_count();
        let relators = pres
            .relators()
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.letters().iter().map(|l| l.code()).collect())
            .collect();
        let mut e = Enumerator {
            ncols,
            cells: Vec::new(),
            parent: Vec::new(),
            relators,
            queue: Vec::new(),
            limits,
            scans: 0,
        };
        e.cells.resize(ncols, NONE);
        e.parent.push(0);
        e
    }

    #[inline]
    fn get(&self, c: u32, col: u32) -> u32 {
        self.cells[c as usize * self.ncols + col as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, col: u32, v: u32) {
        self.cells[c as usize * self.ncols + col as usize] = v;
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, col: u32) -> Result<u32, EnumerationError> {
        let n = self.parent.len();
        if n >= self.limits.max_cosets {
            return Err(EnumerationError::CosetLimit { max_cosets: self.limits.max_cosets });
        }
        let d = n as u32;
        self.parent.push(d);
        self.cells.resize(self.cells.len() + self.ncols, NONE);
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut qi = 0;
        while qi < self.queue.len() {
            let e = self.queue[qi];
            qi += 1;
            for col in 0..self.ncols as u32 {
                let f = self.get(e, col);
                if f == NONE {
                    continue;
                }
                self.set(f, col ^ 1, NONE);
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let ef = self.get(e1, col);
                if ef != NONE {
                    self.merge(f1, ef);
                } else {
                    let fe = self.get(f1, col ^ 1);
                    if fe != NONE {
                        self.merge(e1, fe);
                    } else {
                        self.set(e1, col, f1);
                        self.set(f1, col ^ 1, e1);
                    }
                }
            }
        }
        self.queue.clear();
    }

    fn scan_and_fill(&mut self, c: u32, w: &[u32]) -> Result<(), EnumerationError> {
        self.scans += 1;
        if self.scans > self.limits.max_deductions {
            return Err(EnumerationError::DeductionLimit { max_deductions: self.limits.max_deductions });
        }
        let (mut f, mut i) = (c, 0usize);
        let (mut b, mut j) = (c, w.len());
        loop {
            while i < j {
                let next = self.get(f, w[i]);
                if next == NONE {
                    break;
                }
                f = next;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let next = self.get(b, w[j - 1] ^ 1);
                if next == NONE {
                    break;
                }
                b = next;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn run(&mut self, subgens: &[Word]) -> Result<(), EnumerationError> {
        for h in subgens {
            let codes: Vec<u32> = h.letters().iter().map(|l| l.code()).collect();
            if !codes.is_empty() {
                self.scan_and_fill(0, &codes)?;
            }
        }
        let relators = std::mem::take(&mut self.relators);
        let mut c = 0u32;
        let result = (|| {
            while (c as usize) < self.parent.len() {
                if self.is_live(c) {
                    for r in &relators {
                        self.scan_and_fill(c, r)?;
                        if !self.is_live(c) {
                            break;
                        }
                    }
                    if self.is_live(c) {
                        for col in 0..self.ncols as u32 {
                            if self.get(c, col) == NONE {
                                self.define(c, col)?;
                            }
                        }
                    }
                }
                c += 1;
            }
            Ok(())
        })();
        self.relators = relators;
        result
    }

    fn finish(self, generators: Vec<String>) -> CosetTable {
        let live: Vec<bool> = (0..self.parent.len() as u32).map(|c| self.is_live(c)).collect();
        standardize(generators, self.ncols, &self.cells, &live)
    }
}

/// Renumbers the live cosets reachable from 0 by breadth-first discovery
/// along positive generators, producing a compact table.
fn standardize(generators: Vec<String>, ncols: usize, cells: &[u32], live: &[bool]) -> CosetTable {
    let total = live.len();
    let mut order = Vec::new();
    let mut new_id = vec![NONE; total];
    let mut queue = VecDeque::new();
    new_id[0] = 0;
    order.push(0u32);
    queue.push_back(0u32);
    while let Some(c) = queue.pop_front() {
        for col in (0..ncols).step_by(2) {
            let d = cells[c as usize * ncols + col];
            if d != NONE && new_id[d as usize] == NONE {
                debug_assert!(live[d as usize]);
                new_id[d as usize] = order.len() as u32;
                order.push(d);
                queue.push_back(d);
            }
        }
    }
    let index = order.len();
    let mut out = vec![NONE; index * ncols];
    for (new, &old) in order.iter().enumerate() {
        for col in 0..ncols {
            let d = cells[old as usize * ncols + col];
            out[new * ncols + col] = if d == NONE { NONE } else { new_id[d as usize] };
        }
    }
    CosetTable { generators, index, cells: out }
}
