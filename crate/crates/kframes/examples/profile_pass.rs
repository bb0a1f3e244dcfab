use kframes::cat::{cokernel_pair, equalizer};
use kframes::frame::{class_catalog, is_isomorphic, FrameClass, TableLogic};
use kframes::morphism::{enumerate_pmorphisms, DEFAULT_ENUMERATION_GUARD};
use kframes::algebra::dual_hom;

fn main() {
    let catalog = class_catalog(&FrameClass::Table(TableLogic::K), 4).unwrap();
    println!("catalog: {} frames", catalog.len());
    let t0 = std::time::Instant::now();
    let mut count = 0usize;
    for w in &catalog {
        for v in &catalog {
            count += enumerate_pmorphisms(w, v, DEFAULT_ENUMERATION_GUARD).unwrap().len();
        }
    }
    println!("enumeration only: {} morphisms in {:?}", count, t0.elapsed());

    let t0 = std::time::Instant::now();
    let mut agree = 0usize;
    for w in &catalog {
        for v in &catalog {
            for f in enumerate_pmorphisms(w, v, DEFAULT_ENUMERATION_GUARD).unwrap() {
                let ck = cokernel_pair(&f);
                if ck.iota0.map() == ck.iota1.map() { agree += 1; }
            }
        }
    }
    println!("+cokernel: {} in {:?}", agree, t0.elapsed());

    let t0 = std::time::Instant::now();
    let mut isodom = 0usize;
    for w in &catalog {
        for v in &catalog {
            for f in enumerate_pmorphisms(w, v, DEFAULT_ENUMERATION_GUARD).unwrap() {
                let ck = cokernel_pair(&f);
                let (e_frame, _) = equalizer(&ck.iota0, &ck.iota1).unwrap();
                if is_isomorphic(&e_frame, f.source()).is_some() { isodom += 1; }
            }
        }
    }
    println!("+equalizer+iso: {} in {:?}", isodom, t0.elapsed());

    let t0 = std::time::Instant::now();
    let mut dual_ok = 0usize;
    for w in &catalog {
        for v in &catalog {
            for f in enumerate_pmorphisms(w, v, DEFAULT_ENUMERATION_GUARD).unwrap() {
                let d = dual_hom(&f).unwrap();
                let src = d.source_algebra().clone();
                let tgt = d.target_algebra().clone();
                for x in 0..(1u64 << v.size()) {
                    if d.apply(src.diamond(x)) == tgt.diamond(d.apply(x)) { dual_ok += 1; }
                }
            }
        }
    }
    println!("duality pass: {} in {:?}", dual_ok, t0.elapsed());
}
