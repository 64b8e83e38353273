//! The files in `games/` stay pinned to their in-crate builders.

use std::path::PathBuf;

use dyngame_cli::shipped::shipped_documents;
use dyngame_cli::textfmt::{parse_gamespec, serialize_gamespec};
use dyngame_core::fixtures::{build_example, FixtureRequest};

fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

#[test]
fn files_match_their_generator() {
    for doc in shipped_documents() {
        let path = games_dir().join(doc.filename);
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| {
            panic!(
                "{}: {e}; regenerate with `cargo run -p dyngame-cli --example export_games`",
                path.display()
            )
        });
        assert_eq!(
            on_disk, doc.text,
            "{} drifted from its builder; regenerate with the export_games example",
            doc.filename
        );
    }
}

#[test]
fn shipped_signaling_game_is_structurally_the_builder_game() {
    let text = std::fs::read_to_string(games_dir().join("example3.game")).unwrap();
    let parsed = parse_gamespec(&text).unwrap();
    let fx = build_example(&FixtureRequest::Example3 { c: 0.2 }).unwrap();
    assert_eq!(parsed.game.def(), fx.game.def());
    assert_eq!(parsed.compressions.as_ref().unwrap(), &fx.compressions);
    assert_eq!(parsed.splits["cib"].codes, fx.split.unwrap().codes);
}

#[test]
fn round_trip_is_identity_on_all_shipped_documents() {
    for doc in shipped_documents() {
        let parsed = parse_gamespec(&doc.text).unwrap();
        let text2 = serialize_gamespec(&parsed).unwrap();
        let parsed2 = parse_gamespec(&text2).unwrap();
        assert_eq!(parsed.game.def(), parsed2.game.def(), "{}", doc.filename);
        assert_eq!(parsed.compressions, parsed2.compressions, "{}", doc.filename);
        assert_eq!(parsed.strategies, parsed2.strategies, "{}", doc.filename);
        assert_eq!(parsed.beliefs, parsed2.beliefs, "{}", doc.filename);
        assert_eq!(parsed.splits, parsed2.splits, "{}", doc.filename);
        // The serialized form itself is a fixed point.
        assert_eq!(serialize_gamespec(&parsed2).unwrap(), text2, "{}", doc.filename);
    }
}
