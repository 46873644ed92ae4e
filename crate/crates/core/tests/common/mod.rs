#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;

use l2approx::coset::CosetTable;
use l2approx::homology::IntMatrix;
use l2approx::{Letter, Presentation, Word};

pub type Perm = Vec<u32>;

fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&i| b[i as usize]).collect()
}

fn invert(a: &Perm) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

/// Small p-groups as permutation groups, by generating permutations.
pub fn small_p_groups() -> Vec<(&'static str, Vec<Perm>)> {
    let cycle = |n: u32| -> Perm { (0..n).map(|i| (i + 1) % n).collect() };
    let z3sq_a: Perm = (0..9).map(|i| (i / 3 + 1) % 3 * 3 + i % 3).collect();
    let z3sq_b: Perm = (0..9).map(|i| i / 3 * 3 + (i % 3 + 1) % 3).collect();
    let d4 = vec![vec![1, 2, 3, 0], vec![2, 1, 0, 3]];
    vec![
        ("Z/2", vec![cycle(2)]),
        ("Z/4", vec![cycle(4)]),
        ("Z/8", vec![cycle(8)]),
        ("Z/3", vec![cycle(3)]),
        ("Z/9", vec![cycle(9)]),
        ("(Z/2)^2", vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]),
        ("D4", d4.clone()),
        ("D4 regular", regular(&d4)),
        ("(Z/3)^2", vec![z3sq_a, z3sq_b]),
        ("Q8", vec![vec![1, 2, 3, 0, 5, 6, 7, 4], vec![4, 7, 6, 5, 2, 1, 0, 3]]),
        ("Z/2 x Z/4", vec![vec![1, 0, 2, 3, 4, 5], vec![0, 1, 3, 4, 5, 2]]),
    ]
}

/// All elements of the group generated by `gens`, with a word in the
/// generators for each, breadth first from the identity.
pub fn elements(gens: &[Perm]) -> Vec<(Perm, Vec<usize>)> {
    let n = gens[0].len() as u32;
    let id: Perm = (0..n).collect();
    let mut seen: HashMap<Perm, usize> = HashMap::from([(id.clone(), 0)]);
    let mut out = vec![(id, Vec::new())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (g, p) in gens.iter().enumerate() {
            let next = compose(&out[i].0, p);
            if !seen.contains_key(&next) {
                let mut w = out[i].1.clone();
                w.push(g);
                seen.insert(next.clone(), out.len());
                queue.push_back(out.len());
                out.push((next, w));
            }
        }
    }
    out
}

/// Right regular representation of the group generated by `gens`.
pub fn regular(gens: &[Perm]) -> Vec<Perm> {
    let els = elements(gens);
    let index: HashMap<&Perm, u32> = els.iter().enumerate().map(|(i, (p, _))| (p, i as u32)).collect();
    gens.iter().map(|g| els.iter().map(|(p, _)| index[&compose(p, g)]).collect()).collect()
}

/// A random presentation on `d` generators with `r` relators, all of which
/// map to the identity under a random homomorphism to `group`, and the
/// coset table of the preimage of the stabilizer of point 0.
pub struct RandomCase {
    pub group: &'static str,
    pub presentation: Presentation,
    pub table: CosetTable,
}

pub fn random_case<R: Rng>(rng: &mut R, d: usize, r: usize, group: &'static str, gens: &[Perm]) -> RandomCase {
    let els = elements(gens);
    let images: Vec<Perm> = (0..d).map(|_| els[rng.gen_range(0..els.len())].0.clone()).collect();
    let inverses: Vec<Perm> = images.iter().map(invert).collect();
    let image_of = |w: &Word| {
        w.letters().iter().fold((0..gens[0].len() as u32).collect::<Perm>(), |acc, l| {
            let p = if l.is_inverse() { &inverses[l.generator()] } else { &images[l.generator()] };
            compose(&acc, p)
        })
    };
    let reachable = elements(&images);
    let word_for: HashMap<Perm, Vec<usize>> = reachable.into_iter().collect();

    let mut relators = Vec::with_capacity(r);
    for _ in 0..r {
        let len = rng.gen_range(1..=6);
        let u = Word::from_letters((0..len).map(|_| Letter::new(rng.gen_range(0..d), rng.gen_bool(0.5))));
        let target = invert(&image_of(&u));
        let fix = Word::from_letters(word_for[&target].iter().map(|&g| Letter::positive(g)));
        let rel = u.mul(&fix);
        assert_eq!(image_of(&rel), (0..gens[0].len() as u32).collect::<Perm>());
        relators.push(rel);
    }
    let names: Vec<String> = (0..d).map(|i| format!("g{i}")).collect();
    let presentation = Presentation::new(&names, relators).expect("valid names");

    let mut orbit = vec![0u32];
    let mut pos: HashMap<u32, u32> = HashMap::from([(0, 0)]);
    let mut i = 0;
    while i < orbit.len() {
        for img in &images {
            let q = img[orbit[i] as usize];
            if !pos.contains_key(&q) {
                pos.insert(q, orbit.len() as u32);
                orbit.push(q);
            }
        }
        i += 1;
    }
    let perms: Vec<Perm> = images.iter().map(|img| orbit.iter().map(|&q| pos[&img[q as usize]]).collect()).collect();
    let table = CosetTable::from_permutations(&names, &perms).expect("orbit action is transitive");
    RandomCase { group, presentation, table }
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::from(1),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<BigInt>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 { term } else { -term }
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Elementary divisors from gcds of k-by-k minors.
pub fn minor_gcd_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for k in 1..=m.rows().min(m.cols()) {
        let mut g = BigInt::zero();
        for rows in subsets(m.rows(), k) {
            for cols in subsets(m.cols(), k) {
                let sub: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j).clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

pub fn is_unimodular(m: &IntMatrix) -> bool {
    let rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    m.rows() == m.cols() && det(&rows).abs() == BigInt::from(1)
}

pub fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

/// Validates `value` against `docs/schemas/<name>.json`, returning the
/// error messages.
pub fn schema_errors(name: &str, value: &serde_json::Value) -> Vec<String> {
    let text = std::fs::read_to_string(schema_dir().join(format!("{name}.json"))).expect("schema exists");
    let schema: serde_json::Value = serde_json::from_str(&text).expect("schema is JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    validator.iter_errors(value).map(|e| e.to_string()).collect()
}
