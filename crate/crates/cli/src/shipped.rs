//! The documents shipped in `games/`.
//!
//! `cargo run -p dyngame-cli --example export_games` rewrites the files
//! from this module; an integration test pins the files on disk to it, so
//! the two cannot drift apart.

use dyngame_core::fixtures::{build_example, FixtureRequest};

use crate::textfmt::{serialize_gamespec, GameDocument};

pub struct ShippedDoc {
    pub filename: &'static str,
    pub text: String,
}

pub fn shipped_documents() -> Vec<ShippedDoc> {
    vec![
        ShippedDoc { filename: "example1.game", text: example1() },
        ShippedDoc { filename: "example2.game", text: example2() },
        ShippedDoc { filename: "example3.game", text: example3() },
    ]
}

fn render(header: &str, doc: &GameDocument) -> String {
    format!("{header}\n\n{}", serialize_gamespec(doc).expect("shipped document serializes"))
}

fn example1() -> String {
    let fx = build_example(&FixtureRequest::Example1).expect("fixture builds");
    let mut doc = GameDocument::plain(fx.game);
    doc.compressions = Some(fx.compressions);
    render(
        "# Two-stage game in which alice commits at stage 1 and bob reacts at\n\
         # stage 2. Alice keeps her full history; bob's summary is a constant,\n\
         # which throws away the stage-1 observation his best reply needs, so\n\
         # `check-usi --player B` fails with a witness.",
        &doc,
    )
}

fn example2() -> String {
    let fx = build_example(&FixtureRequest::Example2).expect("fixture builds");
    let assessment = fx.assessment.expect("fixture carries an assessment");
    let mut doc = GameDocument::plain(fx.game);
    doc.compressions = Some(fx.compressions);
    doc.strategies.insert("wpbe".to_string(), assessment.profile);
    doc.beliefs.insert("wpbe".to_string(), assessment.beliefs);
    render(
        "# Two-sided private types with a public match report. Ships an\n\
         # assessment (strategy `wpbe` with belief `wpbe`) whose off-path\n\
         # point-mass beliefs support play that no summary-based equilibrium\n\
         # reproduces; `check-wpbe` accepts it.",
        &doc,
    )
}

fn example3() -> String {
    let c = 0.2;
    let fx = build_example(&FixtureRequest::Example3 { c }).expect("fixture builds");
    let third = 1.0 / 3.0;
    let mut profile = dyngame_core::game::StrategyProfile::uniform(&fx.game);
    profile.strategies[0].tables[0] =
        vec![vec![third, 2.0 * third], vec![2.0 * third, third]];
    profile.strategies[1].tables[1] = vec![
        vec![third + c, 2.0 * third - c],
        vec![third - c, 2.0 * third + c],
    ];
    let mut doc = GameDocument::plain(fx.game);
    doc.compressions = Some(fx.compressions);
    doc.strategies.insert("closed".to_string(), profile);
    doc.splits.insert("cib".to_string(), fx.split.expect("fixture carries a split"));
    render(
        "# Costly-signaling game with signaling cost c = 0.2. Ships the unique\n\
         # equilibrium in closed form (strategy `closed`) and the common/private\n\
         # decomposition of histories (split `cib`) that the equilibrium fails\n\
         # against under `check-belief-based`.",
        &doc,
    )
}
