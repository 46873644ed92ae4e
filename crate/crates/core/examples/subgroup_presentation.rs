//! Reidemeister-Schreier: presentations of finite-index subgroups, with the
//! generator count (d-1)j+1 and relator count rj.

use l2approx::coset::normal_closure_table;
use l2approx::homology::abelian_invariants;
use l2approx::schreier::{deficiency_ledger, rewrite_subgroup};
use l2approx::{parse_presentation, EnumerationLimits, Presentation};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let z2 = parse_presentation("<x,y | [x,y]>")?;
    let table = normal_closure_table(&z2, &[z2.parse_word("x^2")?, z2.parse_word("y")?], EnumerationLimits::default())?;
    let h = rewrite_subgroup(&z2, &table);
    println!("index {} subgroup of Z^2: {}", h.index(), h.presentation());
    for (s, name) in h.schreier_generators().iter().zip(h.presentation().generator_names()) {
        println!("  {name} = {}", z2.display_word(&s.word));
    }
    println!("  abelianization rank {}", abelian_invariants(h.presentation()).rank);
    println!("  rewriting expands back to conjugates of relators: {}", h.verify_rewriting());

    let surface = Presentation::surface(2);
    let words: Vec<_> = ["a1^2", "b1^2", "a2^2", "b2^2", "[a1,b1]", "[a1,a2]", "[a1,b2]", "[b1,a2]", "[b1,b2]", "[a2,b2]"]
        .iter()
        .map(|w| surface.parse_word(w))
        .collect::<Result<_, _>>()?;
    let table = normal_closure_table(&surface, &words, EnumerationLimits::default())?;
    let n = rewrite_subgroup(&surface, &table);
    println!("{}", serde_json::to_string(&n.ledger(3))?);
    println!("supermultiplicativity: def >= {}", deficiency_ledger(3, n.index()));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
