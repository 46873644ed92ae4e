//! Reidemeister–Schreier rewriting: a presentation of a finite-index
//! subgroup from its coset table.
//!
//! Cosets are right cosets `Hg`. The transversal is built breadth-first
//! along positive generators, so every representative is a positive word
//! and the set is prefix-closed. The Schreier generator for coset `t` and
//! generator `x` is `T(t) x T(tx)^-1`; it is trivial exactly when `tx` was
//! discovered from `t` along `x`, which happens `index - 1` times, leaving
//! `(d - 1) index + 1` generators.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::coset::CosetTable;
use crate::presentation::Presentation;
use crate::words::{cyclic_class_key, Letter, Word};

/// Prefix-closed transversal: `transversal[c]` carries coset 0 to coset `c`.
pub fn schreier_transversal(table: &CosetTable) -> Vec<Word> {
    let n = table.index();
    let mut reps: Vec<Option<Word>> = vec![None; n];
    reps[0] = Some(Word::identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for g in 0..table.generator_count() {
            let d = table.image(c, Letter::positive(g));
            if reps[d].is_none() {
                let w = reps[c].as_ref().expect("visited").mul(&Word::generator(g));
                reps[d] = Some(w);
                queue.push_back(d);
            }
        }
    }
    reps.into_iter().map(|w| w.expect("coset tables are transitive")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierGenerator {
    pub coset: usize,
    pub generator: usize,
    /// `T(t) x T(tx)^-1` as a reduced parent word.
    pub word: Word,
}

/// A subgroup presentation produced by [`rewrite_subgroup`].
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    parent: Presentation,
    table: CosetTable,
    transversal: Vec<Word>,
    schreier_gens: Vec<SchreierGenerator>,
    // (coset, generator) -> Schreier generator number, if nontrivial.
    gen_lookup: Vec<Option<usize>>,
    relators: Vec<Word>,
    sources: Vec<(usize, usize)>,
    presentation: Presentation,
}

impl SubgroupPresentation {
    pub fn parent(&self) -> &Presentation {
        &self.parent
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn index(&self) -> usize {
        self.table.index()
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub fn schreier_generators(&self) -> &[SchreierGenerator] {
        &self.schreier_gens
    }

    /// Parent words of the Schreier generators, in generator order.
    pub fn generator_words(&self) -> Vec<Word> {
        self.schreier_gens.iter().map(|s| s.word.clone()).collect()
    }

    /// Rewritten relators over the Schreier generators, before cyclic
    /// reduction, one per (parent relator, coset) pair.
    pub fn rewritten_relators(&self) -> &[Word] {
        &self.relators
    }

    /// `(parent relator, coset)` for each rewritten relator.
    pub fn relator_sources(&self) -> &[(usize, usize)] {
        &self.sources
    }

    /// The induced presentation over the Schreier generators.
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn generator_count(&self) -> usize {
        self.schreier_gens.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// Rewrites a parent word read from coset `start` into Schreier
    /// generators.
    pub fn rewrite(&self, start: usize, w: &Word) -> Word {
        let mut c = start;
        let mut out = Vec::with_capacity(w.len());
        for &l in w.letters() {
            if l.is_inverse() {
                let prev = self.table.image(c, l);
                if let Some(s) = self.gen_lookup[prev * self.parent.generator_count() + l.generator()] {
                    out.push(Letter::negative(s));
                }
                c = prev;
            } else {
                if let Some(s) = self.gen_lookup[c * self.parent.generator_count() + l.generator()] {
                    out.push(Letter::positive(s));
                }
                c = self.table.image(c, l);
            }
        }
        Word::from_letters(out)
    }

    /// Substitutes parent words for Schreier generators.
    pub fn expand(&self, w: &Word) -> Word {
        w.substitute(|s| self.schreier_gens[s].word.clone())
    }

    /// Checks every rewritten relator expands to `T(t) R T(t)^-1`.
    pub fn verify_rewriting(&self) -> bool {
        self.relators.iter().zip(&self.sources).all(|(rel, &(i, t))| {
            let conj = self.transversal[t]
                .mul(&self.parent.relators()[i])
                .mul(&self.transversal[t].inverse());
            self.expand(rel) == conj
        })
    }

    /// Number of nonempty rewritten relators that are distinct up to cyclic
    /// permutation and inversion.
    pub fn distinct_relator_count(&self) -> usize {
        let mut seen = HashSet::new();
        for r in self.presentation.relators() {
            if !r.is_empty() {
                seen.insert(cyclic_class_key(r));
            }
        }
        seen.len()
    }

    /// `generators - r * index`, straight from the rewriting counts.
    pub fn raw_deficiency(&self) -> i64 {
        self.generator_count() as i64 - self.relator_count() as i64
    }

    /// Deficiency of the presentation after dropping trivial relators and
    /// relators that repeat another up to cyclic permutation or inversion.
    /// Such relators have the same normal closure, so this is still a lower
    /// bound for the deficiency of the subgroup.
    pub fn deficiency_bound(&self) -> i64 {
        self.generator_count() as i64 - self.distinct_relator_count() as i64
    }

    /// The induced presentation with trivial and repeated relators removed.
    pub fn simplified(&self) -> Presentation {
        let mut seen = HashSet::new();
        let kept: Vec<Word> = self
            .presentation
            .relators()
            .iter()
            .filter(|r| !r.is_empty() && seen.insert(cyclic_class_key(r)))
            .cloned()
            .collect();
        Presentation::new(&self.presentation.generator_names(), kept).expect("names are valid")
    }

    pub fn ledger(&self, prior_def_bound: i64) -> SchreierLedger {
        SchreierLedger {
            j: self.index(),
            d: self.parent.generator_count(),
            r: self.parent.relator_count(),
            schreier_gen_count: self.generator_count(),
            relator_count: self.relator_count(),
            def_bound: deficiency_ledger(prior_def_bound, self.index()),
            presentation_def: self.raw_deficiency(),
            distinct_relator_count: self.distinct_relator_count(),
            distinct_def: self.deficiency_bound(),
        }
    }
}

/// Count summary of a rewrite, as emitted by the `rs` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchreierLedger {
    pub j: usize,
    pub d: usize,
    pub r: usize,
    pub schreier_gen_count: usize,
    pub relator_count: usize,
    /// Supermultiplicativity bound `(d(G) - 1) j + 1` from the parent's
    /// presentation deficiency.
    pub def_bound: i64,
    pub presentation_def: i64,
    pub distinct_relator_count: usize,
    pub distinct_def: i64,
}

/// Presentation of the subgroup whose coset table is `table`.
pub fn rewrite_subgroup(parent: &Presentation, table: &CosetTable) -> SubgroupPresentation {
    assert_eq!(parent.generator_count(), table.generator_count(), "table is for another presentation");
    let d = parent.generator_count();
    let n = table.index();
    let transversal = schreier_transversal(table);

    let mut gen_lookup = vec![None; n * d];
    let mut schreier_gens = Vec::with_capacity((d.max(1) - 1) * n + 1);
    for t in 0..n {
        for x in 0..d {
            let tx = table.image(t, Letter::positive(x));
            let tree_edge = transversal[tx].len() == transversal[t].len() + 1
                && transversal[tx].letters().last() == Some(&Letter::positive(x))
                && transversal[tx].letters()[..transversal[t].len()] == *transversal[t].letters();
            if tree_edge {
                continue;
            }
            let word = transversal[t].mul(&Word::generator(x)).mul(&transversal[tx].inverse());
            gen_lookup[t * d + x] = Some(schreier_gens.len());
            schreier_gens.push(SchreierGenerator { coset: t, generator: x, word });
        }
    }
    debug_assert_eq!(schreier_gens.len(), (d - 1) * n + 1);

    let names: Vec<String> = schreier_gens
        .iter()
        .map(|s| format!("{}_{}", parent.generators()[s.generator].name, s.coset))
        .collect();

    let mut sub = SubgroupPresentation {
        parent: parent.clone(),
        table: table.clone(),
        transversal,
        schreier_gens,
        gen_lookup,
        relators: Vec::new(),
        sources: Vec::new(),
        presentation: Presentation::free(1),
    };
    let mut relators = Vec::with_capacity(parent.relator_count() * n);
    let mut sources = Vec::with_capacity(parent.relator_count() * n);
    for (i, r) in parent.relators().iter().enumerate() {
        for t in 0..n {
            relators.push(sub.rewrite(t, r));
            sources.push((i, t));
        }
    }
    sub.presentation = Presentation::new(&names, relators.clone()).expect("Schreier names are identifiers");
    sub.relators = relators;
    sub.sources = sources;
    sub
}

/// Supermultiplicativity: a subgroup of index `j` in a group of deficiency
/// at least `parent_def_bound` has deficiency at least
/// `(parent_def_bound - 1) j + 1`.
pub fn deficiency_ledger(parent_def_bound: i64, j: usize) -> i64 {
    assert!(j >= 1, "index must be positive");
    (parent_def_bound - 1) * j as i64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{normal_closure_table, todd_coxeter};
    use crate::homology::b1;
    use crate::presentation::parse_presentation;

    fn pres(s: &str) -> Presentation {
        parse_presentation(s).unwrap()
    }

    #[test]
    fn transversals() {
        let f2 = pres("<x,y|>");
        let t = CosetTable::trivial(&f2.generator_names());
        assert_eq!(schreier_transversal(&t), vec![Word::identity()]);

        let z = pres("<x|>");
        let t = normal_closure_table(&z, &[z.parse_word("x^4").unwrap()], Default::default()).unwrap();
        let tr = schreier_transversal(&t);
        let expect: Vec<Word> = (0..4).map(|k| Word::generator(0).pow(k)).collect();
        assert_eq!(tr, expect);

        let kernel: Vec<Word> = ["x^2", "y", "x y x^-1"].iter().map(|s| f2.parse_word(s).unwrap()).collect();
        let t = todd_coxeter(&f2, &kernel, Default::default()).unwrap();
        assert_eq!(schreier_transversal(&t), vec![Word::identity(), Word::generator(0)]);
    }

    #[test]
    fn free_group_index_two() {
        let f2 = pres("<x,y|>");
        let kernel: Vec<Word> = ["x^2", "y", "x y x^-1"].iter().map(|s| f2.parse_word(s).unwrap()).collect();
        let t = todd_coxeter(&f2, &kernel, Default::default()).unwrap();
        let sub = rewrite_subgroup(&f2, &t);
        assert_eq!(sub.generator_count(), 3);
        assert_eq!(sub.relator_count(), 0);
    }

    #[test]
    fn z2_index_two() {
        let z2 = pres("<x,y|[x,y]>");
        let h: Vec<Word> = ["x^2", "y", "x y x^-1"].iter().map(|s| z2.parse_word(s).unwrap()).collect();
        let t = todd_coxeter(&z2, &h, Default::default()).unwrap();
        let sub = rewrite_subgroup(&z2, &t);
        assert_eq!(sub.generator_count(), 3);
        assert_eq!(sub.relator_count(), 2);
        assert!(sub.verify_rewriting());
        assert_eq!(b1(sub.presentation()), 2);
    }

    #[test]
    fn index_one_reproduces_parent() {
        let s3 = pres("<a,b|a^2,b^2,(a b)^3>");
        let t = CosetTable::trivial(&s3.generator_names());
        let sub = rewrite_subgroup(&s3, &t);
        assert_eq!(sub.generator_count(), 2);
        assert_eq!(sub.relator_count(), 3);
        assert!(sub.verify_rewriting());
        let expanded: Vec<Word> = sub.presentation().relators().iter().map(|r| sub.expand(r)).collect();
        assert_eq!(expanded, s3.relators());
    }

    #[test]
    fn ledger_arithmetic() {
        assert_eq!(deficiency_ledger(1, 4), 1);
        assert_eq!(deficiency_ledger(3, 16), 33);
        assert_eq!(deficiency_ledger(2, 1), 2);
        // Composing over a tower of indices multiplies them.
        for (b, j1, j2) in [(3, 4, 4), (-1, 2, 3), (1, 5, 7), (2, 16, 2)] {
            assert_eq!(deficiency_ledger(deficiency_ledger(b, j1), j2), deficiency_ledger(b, j1 * j2));
        }
    }

    #[test]
    fn power_relators_collapse_up_to_rotation() {
        // In <x,y | x^4>, the kernel of x -> Z/4 has four rewritten copies of
        // x^4 that are rotations of one another.
        let g = pres("<x,y|x^4>");
        let h: Vec<Word> = ["x^4", "y", "x y x^-1", "x^2 y x^-2", "x^3 y x^-3"]
            .iter()
            .map(|s| g.parse_word(s).unwrap())
            .collect();
        let t = todd_coxeter(&g, &h, Default::default()).unwrap();
        assert_eq!(t.index(), 4);
        let sub = rewrite_subgroup(&g, &t);
        assert_eq!(sub.relator_count(), 4);
        assert_eq!(sub.distinct_relator_count(), 1);
        assert_eq!(sub.raw_deficiency(), 5 - 4);
        assert_eq!(sub.deficiency_bound(), 5 - 1);
        assert_eq!(sub.simplified().relator_count(), 1);
    }
}
