use kframes::calculus::formula::Formula;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_formula(rng: &mut StdRng, depth: usize) -> Formula {
    use kframes::calculus::formula as f;
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => f::var("p"),
            1 => f::var("q"),
            2 => f::top(),
            _ => f::bot(),
        };
    }
    match rng.gen_range(0..7) {
        0 => f::var("p"),
        1 => f::var("q"),
        2 => f::neg(random_formula(rng, depth - 1)),
        3 => f::bx(random_formula(rng, depth - 1)),
        4 => f::and([random_formula(rng, depth - 1), random_formula(rng, depth - 1)]),
        5 => f::or([random_formula(rng, depth - 1), random_formula(rng, depth - 1)]),
        _ => f::imp(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
    }
}

fn main() {
    let mut rng = StdRng::seed_from_u64(12);
    for i in 0..200 {
        let f = random_formula(&mut rng, 4);
        match kframes::calculus::normal::normal_form_guarded(&f, 2_000_000) {
            Ok(nf) => {
                if nf.cell_count() > 1000 {
                    println!("{i}: BIG {} cells <- {f}", nf.cell_count());
                }
            }
            Err(e) => println!("{i}: FAIL {e} <- {f}"),
        }
    }
}
