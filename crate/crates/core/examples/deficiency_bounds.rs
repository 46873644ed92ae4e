//! Deficiency arithmetic: the quotient drop, power quotients and how
//! certificates replay from their provenance.

use l2approx::bounds::{def_lower_bound, l23_certificate, l23_drop, quotient_by_power, vd_lower_bound};
use l2approx::{parse_presentation, EnumerationLimits, Word};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    println!("def(N) = 33, [G:N] = 16, order 16: def(M) >= {}", l23_drop(33, 16, 16)?);
    println!("def(N) = 129, [G:N] = 128, order 4: def(M) >= {}", l23_drop(129, 128, 4)?);
    println!("order 0: {:?}", l23_drop(1, 4, 0));

    let cert = l23_certificate(33, 16, 16)?;
    println!("{}", serde_json::to_string_pretty(&cert)?);

    let f2 = parse_presentation("<x,y|>")?;
    for n in 1..=3 {
        let q = quotient_by_power(&f2, &Word::generator(0), 2, n)?;
        let vd = vd_lower_bound(&q, 2, 2, EnumerationLimits::default())?;
        println!("{q}: def >= {}, vd_2 >= {}", def_lower_bound(&q), vd.certificate.value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
