//! First homology through the Smith normal form of the exponent-sum matrix.

use l2approx::homology::{abelian_invariants, b1_mod_p, exponent_matrix, smith_normal_form, IntMatrix};
use l2approx::parse_presentation;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["<x,y|[x,y]>", "<a,b|a^2,b^2,(a b)^3>", "<x,y|x^4 y^6, x^2 y^-2>", "<x|x^7>"] {
        let g = parse_presentation(text)?;
        let inv = abelian_invariants(&g);
        let torsion: Vec<String> = inv.torsion().iter().map(ToString::to_string).collect();
        println!(
            "{g}: rank {}, torsion [{}], dim H1(F2) = {}",
            inv.rank,
            torsion.join(", "),
            b1_mod_p(&g, 2)?
        );
    }

    let g = parse_presentation("<a,b|a^2,b^2,(a b)^3>")?;
    println!("exponent matrix {:?}", exponent_matrix(&g));

    let m = IntMatrix::from_rows(3, &[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    let snf = smith_normal_form(&m, true);
    let (u, v, d) = snf.transforms.expect("requested");
    println!("D = {d:?}");
    println!("U M V == D: {}", u.mul(&m).mul(&v) == d);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
