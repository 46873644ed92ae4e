//! Parsing presentations and words, and what a syntax error looks like.

use l2approx::{parse_presentation, Presentation};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let s3 = parse_presentation("< a, b | a^2, b^2, (a b)^3 >")?;
    println!("{s3}  (d = {}, r = {})", s3.generator_count(), s3.relator_count());

    // Relators are stored cyclically reduced; commutators expand.
    let g = parse_presentation("<x,y | y x^2 y^-1 , [x,y]  # a comment\n>")?;
    println!("{g}");

    let w = g.parse_word("(x y)^-2 x")?;
    println!("word: {}", g.display_word(&w));

    println!("genus 2: {}", Presentation::surface(2));

    match parse_presentation("<x,y | x z>") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
