//! Writes the sample inputs under `data/`: `cargo run -p ainfty-core --example write_samples -- data`.

use std::collections::BTreeMap;
use std::path::Path;

use ainfty_coeff::{Ring, Scalar, SparseMatrix};
use ainfty_core::ainfty::{find_strict_units, AInfty, Functor, SplitUnitWitness, Table};
use ainfty_core::contraction::FilteredComplex;
use ainfty_core::io::{filtered_complex_doc, functor_doc, structure_doc, to_json, witness_doc, GrHomotopiesDoc, SCHEMA};
use ainfty_core::samples::{dual_numbers, endomorphism_dg, ground, m3_example, non_associative, Complex};

fn write(dir: &Path, name: &str, s: String) {
    std::fs::write(dir.join(name), s).unwrap();
    println!("wrote {name}");
}

fn witness(a: &AInfty) -> SplitUnitWitness {
    SplitUnitWitness::canonical(&find_strict_units(a).unwrap().unwrap()).unwrap()
}

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    let dir = Path::new(&dir);
    std::fs::create_dir_all(dir).unwrap();
    let f5 = Ring::fp(5).unwrap();
    let dq = dual_numbers(Ring::Q, 6).unwrap();
    let dz = dual_numbers(Ring::Z, 6).unwrap();
    write(dir, "dual_numbers.json", to_json(&structure_doc(&dq)));
    write(dir, "dual_numbers_z.json", to_json(&structure_doc(&dz)));
    write(dir, "dual_numbers_z_retraction.json", to_json(&witness_doc(&dz, &witness(&dz))));
    write(dir, "m3_example.json", to_json(&structure_doc(&m3_example(f5, 5).unwrap())));
    write(dir, "non_associative.json", to_json(&structure_doc(&non_associative(f5, 4).unwrap())));
    let k = ground(Ring::Q, 6).unwrap();
    let end = endomorphism_dg(Ring::Q, &Complex::contractible(), 6).unwrap();
    write(dir, "end_contractible.json", to_json(&structure_doc(&end)));
    let zero = Functor::new(k.clone(), end, vec![0], 5, Table::new()).unwrap();
    write(dir, "zero_functor.json", to_json(&functor_doc(&zero)));
    write(dir, "ground_witness.json", to_json(&witness_doc(&k, &witness(&k))));

    // F_1 = ⟨x, y⟩ with zero differential; gr_2 = ⟨a → b⟩; d(a) = y + b
    let one = Ring::Q.one();
    let zero_s = Ring::Q.zero();
    let col = |v: [i64; 4]| v.iter().map(|&c| Scalar::from_i64(Ring::Q, c)).collect::<Vec<_>>();
    let d = SparseMatrix::from_columns(Ring::Q, 4, &[col([0; 4]), col([0; 4]), col([0, 1, 0, 1]), col([0; 4])]);
    let mut fc = FilteredComplex::new(vec![0, 1, 0, 1], d, vec![1, 1, 2, 2]).unwrap();
    fc.labels = vec!["x".into(), "y".into(), "a".into(), "b".into()];
    write(dir, "filtered_complex.json", to_json(&filtered_complex_doc(&fc)));
    let h = SparseMatrix::from_columns(Ring::Q, 2, &[vec![zero_s.clone(), zero_s.clone()], vec![one, zero_s]]);
    let doc = GrHomotopiesDoc { schema: SCHEMA.into(), homotopies: BTreeMap::from([(2, h)]) };
    write(dir, "gr_homotopies.json", to_json(&doc));
}
