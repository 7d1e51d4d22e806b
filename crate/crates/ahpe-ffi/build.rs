use std::env;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        cpp_compat: true,
        include_guard: Some("AHPE_H".to_owned()),
        documentation: true,
        header: Some(
            "/* C interface to the ahpe experiment harness.\n * Generated from src/lib.rs on every build; do not edit by hand. */"
                .to_owned(),
        ),
        enumeration: cbindgen::EnumConfig {
            prefix_with_name: true,
            rename_variants: cbindgen::RenameRule::ScreamingSnakeCase,
            ..Default::default()
        },
        ..Default::default()
    };
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("failed to generate include/ahpe.h")
        .write_to_file(format!("{crate_dir}/include/ahpe.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
}
