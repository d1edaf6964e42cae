use std::fs;
use std::path::Path;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    let out_dir = std::env::var("OUT_DIR").unwrap();
    let generated = Path::new(&out_dir).join("loopform.h");

    let config = cbindgen::Config::from_file(Path::new(&crate_dir).join("cbindgen.toml"))
        .expect("cbindgen.toml is malformed");
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&generated);
            // Refresh the committed header only when the contents change so
            // repeated builds leave the tree untouched.
            let committed = Path::new(&crate_dir).join("include").join("loopform.h");
            let fresh = fs::read(&generated).unwrap_or_default();
            if fs::read(&committed).ok().as_deref() != Some(fresh.as_slice()) {
                let _ = fs::create_dir_all(committed.parent().unwrap());
                let _ = fs::write(&committed, fresh);
            }
        }
        Err(err) => println!("cargo:warning=skipping header generation: {err}"),
    }
}
