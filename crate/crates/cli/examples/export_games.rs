//! Rewrite the shipped documents in `games/` from their builders.

use std::path::PathBuf;

fn main() {
    let out = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games");
    std::fs::create_dir_all(&out).expect("create games/");
    for doc in dyngame_cli::shipped::shipped_documents() {
        let path = out.join(doc.filename);
        std::fs::write(&path, &doc.text).expect("write document");
        println!("wrote {}", path.display());
    }
}
