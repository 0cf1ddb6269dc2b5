//! Rewrites `corpus/builtin.corpus` from the generator.

use rewbl::corpus::{builtin_corpus, write_corpus};

fn main() -> std::io::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/builtin.corpus");
    std::fs::write(path, write_corpus(&builtin_corpus()))?;
    println!("wrote {path}");
    Ok(())
}
