//! Exact arithmetic in Q(√D) and continued fractions of quadratic irrationals.
use quadsplit::quadfield::{cf_expand, QuadSurd};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let golden: QuadSurd = "(-1 + 1*sqrt(5))/2".parse()?;
    let sq = golden.checked_mul(&golden)?;
    let one = QuadSurd::from_integer(1, 5)?;
    // x² + x = 1 holds exactly
    println!("x = {golden}, x^2 + x = {}", sq.checked_add(&golden)?);
    assert_eq!(sq.checked_add(&golden)?, one);

    let x = QuadSurd::new(-1, 1, 1, 3)?;
    let exp = cf_expand(&x, 32)?;
    println!("{x} = [0; {:?}...], period {:?}", exp.digits, exp.period);
    println!("rint(10 x) = {}", x.scale(&10.into()).rint()?);
    Ok(())
}
