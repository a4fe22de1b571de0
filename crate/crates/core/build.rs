use std::fmt::Write as _;
use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap()).join("fixtures");
    println!("cargo:rerun-if-changed={}", dir.display());

    let mut entries: Vec<(u64, PathBuf)> = std::fs::read_dir(&dir)
        .expect("fixtures directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter_map(|p| {
            let stem = p.file_stem()?.to_str()?;
            let level = stem.strip_prefix("gamma0_")?.parse().ok()?;
            (p.extension()? == "basis").then_some((level, p))
        })
        .collect();
    entries.sort();

    let mut out = String::from("static BUNDLED: &[(u64, &str)] = &[\n");
    for (level, path) in &entries {
        println!("cargo:rerun-if-changed={}", path.display());
        writeln!(
            out,
            "    ({level}, include_str!({:?})),",
            path.display().to_string()
        )
        .unwrap();
    }
    out.push_str("];\n");
    let dest = PathBuf::from(std::env::var("OUT_DIR").unwrap()).join("bundled_fixtures.rs");
    std::fs::write(dest, out).unwrap();
}
