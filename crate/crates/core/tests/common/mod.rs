use polypart::poly::{parse_poly, MPoly};

pub struct Golden {
    pub name: String,
    pub nvars: usize,
    pub gens: Vec<MPoly>,
    pub basis: Vec<MPoly>,
    pub dim: i64,
}

pub fn load() -> Vec<Golden> {
    let src = include_str!("../fixtures/golden_ideals.txt");
    let mut out = Vec::new();
    for block in src.split("\n\n") {
        let fields: Vec<(&str, &str)> = block
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| l.split_once(':').expect("field"))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        if fields.is_empty() {
            continue;
        }
        let get = |k: &str| fields.iter().find(|f| f.0 == k).unwrap_or_else(|| panic!("missing {k}")).1;
        let nvars: usize = get("nvars").parse().unwrap();
        let polys = |k: &str| -> Vec<MPoly> { get(k).split(';').map(|s| parse_poly(s, nvars).unwrap()).collect() };
        out.push(Golden {
            name: get("name").to_string(),
            nvars,
            gens: polys("gens"),
            basis: polys("basis"),
            dim: get("dim").parse().unwrap(),
        });
    }
    out
}
