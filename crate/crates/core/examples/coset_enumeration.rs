//! Todd-Coxeter enumeration: the regular representation of S3, a subgroup
//! table, and what happens when the index is infinite.

use l2approx::coset::{is_normal, normal_closure_table, todd_coxeter};
use l2approx::{parse_presentation, EnumerationError, EnumerationLimits};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let s3 = parse_presentation("<a,b | a^2, b^2, (a b)^3>")?;
    let regular = todd_coxeter(&s3, &[], EnumerationLimits::default())?;
    println!("|S3| = {}", regular.index());
    for (g, name) in regular.generator_names().iter().enumerate() {
        println!("  {name} acts as {:?}", regular.permutation(g));
    }

    let a = s3.parse_word("a")?;
    let sub = todd_coxeter(&s3, &[a.clone()], EnumerationLimits::default())?;
    println!("[S3 : <a>] = {}, normal: {}", sub.index(), is_normal(&s3, &sub, &[a]));

    let quotient = normal_closure_table(&s3, &[s3.parse_word("a b")?], EnumerationLimits::default())?;
    println!("S3 / <<ab>> has order {}", quotient.index());
    println!("{}", serde_json::to_string(&quotient)?);

    let f2 = parse_presentation("<x,y|>")?;
    match todd_coxeter(&f2, &[f2.parse_word("x")?], EnumerationLimits::with_max_cosets(500)) {
        Err(EnumerationError::CosetLimit { max_cosets }) => println!("<x> in F2: gave up after {max_cosets} cosets"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
