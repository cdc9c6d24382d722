#![allow(dead_code)]

pub mod oracle;

use hienergy::genset::{gen, SetRecipe};
use hienergy::verify::CheckInput;
use hienergy::{GSet, GroupSpec};

pub fn set(group: &str, xs: &[i64]) -> GSet {
    GSet::from_ints(&group.parse::<GroupSpec>().unwrap(), xs).unwrap()
}

fn recipe(s: &str) -> GSet {
    gen(&s.parse::<SetRecipe>().unwrap()).unwrap()
}

/// 200 random sets over `Z/64`, `Z/128`, `Z/4 x Z/8` and 20 lattice sets, all of size 4..=16.
pub fn corpus() -> Vec<CheckInput> {
    let groups = ["Z/64", "Z/128", "Z/4xZ/8"];
    let mut out = Vec::new();
    for i in 0..200u64 {
        let g = groups[(i % 3) as usize];
        let size = 4 + (i % 13);
        let r = format!("random:group={g},size={size},seed={i}");
        out.push(CheckInput::new(recipe(&r)).with_label(r).with_seed(i));
    }
    for i in 0..20u64 {
        let size = 4 + (i % 13);
        let r = if i % 2 == 0 {
            format!("random:group=Z,size={size},side=40,seed={}", 1000 + i)
        } else {
            format!("random:group=Z^2,size={size},side=7,seed={}", 1000 + i)
        };
        out.push(CheckInput::new(recipe(&r)).with_label(r).with_seed(1000 + i));
    }
    out
}
