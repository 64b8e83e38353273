//! Sectioned text format for game documents.
//!
//! A document declares one game and optionally carries summary maps
//! (`[compression i=..]`), full-history strategy profiles
//! (`[strategy name=..]`), belief systems (`[belief name=..]`), and
//! common/private history splits (`[split name=..]`). Sections may appear
//! in any order; `#` starts a comment.
//!
//! Numbers are decimals or fractions `p/q`; fractions parse as the exact
//! f64 quotient, so `1/3` survives a serialize/parse round trip bit for
//! bit. Labels are bare tokens and must avoid whitespace, quotes, and the
//! structural characters `. = : # [ ]`. Space names default to a canonical
//! scheme (`x[t]`, `u[t] player`, `z[t] player`, `h[1] player`,
//! `k[t] player`) and only appear, quoted, when they differ from it.
//!
//! Histories are written as label paths `init.z1.z2...` with one component
//! per observed stage. Strategy rows left out stay uniform; reward rows
//! left out are zero; belief atoms left out are zero. Kernel cells must
//! all be present.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use dyngame_core::equilibrium::belief_based::CommonInfoSplit;
use dyngame_core::equilibrium::wpbe::{belief_dims, Assessment};
use dyngame_core::game::{
    history_extend, validate_game, Compression, CompressionProfile, GameDef, GameSpec,
    InitialEntry, KernelEntry, StrategyProfile, ValidationReport, DEFAULT_SUPPORT_CAP,
};
use dyngame_core::space::Space;
use thiserror::Error;

/// 1-based position of a token; line 0 stands for the document as a whole.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "document")
        } else {
            write!(f, "line {}, column {}", self.line, self.col)
        }
    }
}

const DOC: Pos = Pos { line: 0, col: 0 };

#[derive(Debug, Error)]
pub enum ParseError {
    /// Malformed tokens: unterminated quotes, missing separators, numbers
    /// that do not parse.
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    /// Well-formed rows whose content does not fit the game: unknown
    /// labels, wrong arity, duplicate or missing rows.
    #[error("semantic error at {pos}: {msg}")]
    Semantic { pos: Pos, msg: String },
    /// The assembled tables were rejected by game validation.
    #[error(transparent)]
    Validation(#[from] ValidationReport),
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

fn semantic(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic { pos, msg: msg.into() }
}

#[derive(Debug, Error)]
pub enum SerializeError {
    /// The in-memory value uses a feature the format cannot carry, such as
    /// labels with reserved characters or rewards that vary inside one
    /// `(t, x, u)` cell.
    #[error("cannot serialize: {0}")]
    Unrepresentable(String),
}

/// Belief tables `beliefs[i][t-1][h]` over `(x_t, others' histories)`,
/// later component fastest; the shape of [`Assessment`] beliefs.
pub type BeliefSystem = Vec<Vec<Vec<Vec<f64>>>>;

/// Everything one document can declare.
#[derive(Clone, Debug)]
pub struct GameDocument {
    pub game: GameSpec,
    /// Either every player has a summary map or none does.
    pub compressions: Option<CompressionProfile>,
    pub strategies: BTreeMap<String, StrategyProfile>,
    pub beliefs: BTreeMap<String, BeliefSystem>,
    pub splits: BTreeMap<String, CommonInfoSplit>,
}

impl GameDocument {
    pub fn plain(game: GameSpec) -> Self {
        GameDocument {
            game,
            compressions: None,
            strategies: BTreeMap::new(),
            beliefs: BTreeMap::new(),
            splits: BTreeMap::new(),
        }
    }

    /// Pair a named strategy with a named belief system.
    pub fn assessment(&self, strategy: &str, belief: &str) -> Option<Assessment> {
        Some(Assessment {
            profile: self.strategies.get(strategy)?.clone(),
            beliefs: self.beliefs.get(belief)?.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    quoted: bool,
    pos: Pos,
}

fn tokenize_line(line: &str, lineno: usize) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = line.chars().enumerate().peekable();
    while let Some(&(ci, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            break;
        }
        let pos = Pos { line: lineno, col: ci + 1 };
        if c == '"' {
            chars.next();
            let mut s = String::new();
            let mut closed = false;
            for (_, c2) in chars.by_ref() {
                if c2 == '"' {
                    closed = true;
                    break;
                }
                s.push(c2);
            }
            if !closed {
                return Err(syntax(pos, "unterminated quote"));
            }
            toks.push(Tok { text: s, quoted: true, pos });
        } else {
            let mut s = String::new();
            while let Some(&(_, c2)) = chars.peek() {
                if c2.is_whitespace() || c2 == '"' || c2 == '#' {
                    break;
                }
                s.push(c2);
                chars.next();
            }
            toks.push(Tok { text: s, quoted: false, pos });
        }
    }
    Ok(toks)
}

struct RawSection {
    kind: String,
    args: Vec<(String, String)>,
    pos: Pos,
    rows: Vec<Vec<Tok>>,
}

impl RawSection {
    fn arg(&self, key: &str) -> Result<&str, ParseError> {
        self.args
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| syntax(self.pos, format!("section [{}] needs {key}=..", self.kind)))
    }
}

fn split_sections(text: &str) -> Result<Vec<RawSection>, ParseError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let lineno = ln + 1;
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let lead = line.chars().count() - trimmed.chars().count();
            let pos = Pos { line: lineno, col: lead + 1 };
            let Some(end) = rest.find(']') else {
                return Err(syntax(pos, "unterminated section header"));
            };
            let tail = rest[end + 1..].trim();
            if !tail.is_empty() && !tail.starts_with('#') {
                return Err(syntax(pos, "content after section header"));
            }
            let mut words = rest[..end].split_whitespace();
            let Some(kind) = words.next() else {
                return Err(syntax(pos, "empty section header"));
            };
            let mut args = Vec::new();
            for w in words {
                let Some((k, v)) = w.split_once('=') else {
                    return Err(syntax(pos, format!("expected key=value in header, got {w}")));
                };
                args.push((k.to_string(), v.to_string()));
            }
            sections.push(RawSection { kind: kind.to_string(), args, pos, rows: Vec::new() });
        } else {
            let toks = tokenize_line(line, lineno)?;
            if toks.is_empty() {
                continue;
            }
            match sections.last_mut() {
                Some(s) => s.rows.push(toks),
                None => {
                    return Err(syntax(toks[0].pos, "content before the first section header"))
                }
            }
        }
    }
    Ok(sections)
}

// ---------------------------------------------------------------------------
// Row cursor
// ---------------------------------------------------------------------------

struct Cur<'a> {
    toks: &'a [Tok],
    i: usize,
}

impl<'a> Cur<'a> {
    fn new(toks: &'a [Tok]) -> Self {
        Cur { toks, i: 0 }
    }

    fn next(&mut self, what: &str) -> Result<&'a Tok, ParseError> {
        let t = self
            .toks
            .get(self.i)
            .ok_or_else(|| syntax(self.toks[self.toks.len() - 1].pos, format!("expected {what}")))?;
        self.i += 1;
        Ok(t)
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        let t = self.next(&format!("`{lit}`"))?;
        if t.quoted || t.text != lit {
            return Err(syntax(t.pos, format!("expected `{lit}`, got `{}`", t.text)));
        }
        Ok(())
    }

    /// A quoted token, if the next token is one.
    fn maybe_name(&mut self) -> Option<String> {
        match self.toks.get(self.i) {
            Some(t) if t.quoted => {
                self.i += 1;
                Some(t.text.clone())
            }
            _ => None,
        }
    }

    fn rest(&mut self) -> &'a [Tok] {
        let r = &self.toks[self.i..];
        self.i = self.toks.len();
        r
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.toks.get(self.i) {
            None => Ok(()),
            Some(t) => Err(syntax(t.pos, format!("unexpected `{}`", t.text))),
        }
    }
}

fn parse_count(tok: &Tok, what: &str) -> Result<usize, ParseError> {
    tok.text
        .parse::<usize>()
        .map_err(|_| syntax(tok.pos, format!("expected {what}, got `{}`", tok.text)))
}

/// Decimal or fraction `p/q` with integer parts; fractions divide in f64.
fn parse_number(tok: &Tok) -> Result<f64, ParseError> {
    let bad = || syntax(tok.pos, format!("expected a number, got `{}`", tok.text));
    let v = if let Some((p, q)) = tok.text.split_once('/') {
        let pn: i64 = p.parse().map_err(|_| bad())?;
        let qn: i64 = q.parse().map_err(|_| bad())?;
        if qn == 0 {
            return Err(syntax(tok.pos, "fraction with zero denominator"));
        }
        pn as f64 / qn as f64
    } else {
        tok.text.parse::<f64>().map_err(|_| bad())?
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

fn kv<'t>(tok: &'t Tok, key: &str) -> Result<&'t str, ParseError> {
    match tok.text.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => Err(syntax(tok.pos, format!("expected {key}=.., got `{}`", tok.text))),
    }
}

fn kv_count(tok: &Tok, key: &str) -> Result<usize, ParseError> {
    let v = kv(tok, key)?;
    v.parse::<usize>()
        .map_err(|_| syntax(tok.pos, format!("expected {key}=<integer>, got `{}`", tok.text)))
}

fn space_index(space: &Space, tok: &Tok, what: &str) -> Result<usize, ParseError> {
    space.index_of(&tok.text).ok_or_else(|| {
        semantic(tok.pos, format!("unknown {what} label `{}` in {}", tok.text, space.name))
    })
}

// ---------------------------------------------------------------------------
// Canonical space names
// ---------------------------------------------------------------------------

fn canon_state(t: usize) -> String {
    format!("x[{t}]")
}

fn canon_action(t: usize, player: &str) -> String {
    format!("u[{t}] {player}")
}

fn canon_increment(t: usize, player: &str) -> String {
    format!("z[{t}] {player}")
}

fn canon_init(player: &str) -> String {
    format!("h[1] {player}")
}

fn canon_comp(t: usize, player: &str) -> String {
    format!("k[{t}] {player}")
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

pub fn parse_gamespec(text: &str) -> Result<GameDocument, ParseError> {
    let sections = split_sections(text)?;

    let mut players_sec = None;
    let mut horizon_sec = None;
    let mut cap_sec = None;
    let mut spaces_sec = None;
    let mut initial_sec = None;
    let mut rewards_sec = None;
    let mut recall_secs: BTreeMap<usize, &RawSection> = BTreeMap::new();
    let mut kernel_secs: BTreeMap<usize, &RawSection> = BTreeMap::new();
    let mut comp_secs: Vec<&RawSection> = Vec::new();
    let mut strategy_secs: Vec<&RawSection> = Vec::new();
    let mut belief_secs: Vec<&RawSection> = Vec::new();
    let mut split_secs: Vec<&RawSection> = Vec::new();

    for sec in &sections {
        let dup = |old: &Option<&RawSection>| old.is_some();
        match sec.kind.as_str() {
            "players" => {
                if dup(&players_sec) {
                    return Err(semantic(sec.pos, "duplicate [players] section"));
                }
                players_sec = Some(sec);
            }
            "horizon" => {
                if dup(&horizon_sec) {
                    return Err(semantic(sec.pos, "duplicate [horizon] section"));
                }
                horizon_sec = Some(sec);
            }
            "support-cap" => {
                if dup(&cap_sec) {
                    return Err(semantic(sec.pos, "duplicate [support-cap] section"));
                }
                cap_sec = Some(sec);
            }
            "spaces" => {
                if dup(&spaces_sec) {
                    return Err(semantic(sec.pos, "duplicate [spaces] section"));
                }
                spaces_sec = Some(sec);
            }
            "initial" => {
                if dup(&initial_sec) {
                    return Err(semantic(sec.pos, "duplicate [initial] section"));
                }
                initial_sec = Some(sec);
            }
            "rewards" => {
                if dup(&rewards_sec) {
                    return Err(semantic(sec.pos, "duplicate [rewards] section"));
                }
                rewards_sec = Some(sec);
            }
            "recall" => {
                let t = sec.arg("t")?.parse::<usize>().map_err(|_| {
                    syntax(sec.pos, "recall header needs t=<integer>")
                })?;
                if recall_secs.insert(t, sec).is_some() {
                    return Err(semantic(sec.pos, format!("duplicate [recall t={t}] section")));
                }
            }
            "kernel" => {
                let t = sec.arg("t")?.parse::<usize>().map_err(|_| {
                    syntax(sec.pos, "kernel header needs t=<integer>")
                })?;
                if kernel_secs.insert(t, sec).is_some() {
                    return Err(semantic(sec.pos, format!("duplicate [kernel t={t}] section")));
                }
            }
            "compression" => comp_secs.push(sec),
            "strategy" => strategy_secs.push(sec),
            "belief" => belief_secs.push(sec),
            "split" => split_secs.push(sec),
            other => return Err(semantic(sec.pos, format!("unknown section [{other}]"))),
        }
    }

    // Players and horizon drive every shape below.
    let players_sec = players_sec.ok_or_else(|| semantic(DOC, "missing [players] section"))?;
    let mut players: Vec<String> = Vec::new();
    for row in &players_sec.rows {
        for tok in row {
            if players.contains(&tok.text) {
                return Err(semantic(tok.pos, format!("duplicate player `{}`", tok.text)));
            }
            players.push(tok.text.clone());
        }
    }
    if players.is_empty() {
        return Err(semantic(players_sec.pos, "no players declared"));
    }
    let n = players.len();
    let player_index = |tok: &Tok| -> Result<usize, ParseError> {
        players
            .iter()
            .position(|p| *p == tok.text)
            .ok_or_else(|| semantic(tok.pos, format!("unknown player `{}`", tok.text)))
    };

    let horizon_sec = horizon_sec.ok_or_else(|| semantic(DOC, "missing [horizon] section"))?;
    let horizon = match &horizon_sec.rows[..] {
        [row] if row.len() == 1 => parse_count(&row[0], "the horizon")?,
        _ => return Err(syntax(horizon_sec.pos, "[horizon] holds exactly one integer")),
    };
    if horizon == 0 {
        return Err(semantic(horizon_sec.pos, "horizon must be at least 1"));
    }

    let support_cap = match cap_sec {
        None => DEFAULT_SUPPORT_CAP,
        Some(sec) => match &sec.rows[..] {
            [row] if row.len() == 1 => parse_count(&row[0], "the support cap")?,
            _ => return Err(syntax(sec.pos, "[support-cap] holds exactly one integer")),
        },
    };

    // Spaces, keyed until coverage is checked.
    let spaces_sec = spaces_sec.ok_or_else(|| semantic(DOC, "missing [spaces] section"))?;
    let mut state_spaces: BTreeMap<usize, Space> = BTreeMap::new();
    let mut action_spaces: BTreeMap<(usize, usize), Space> = BTreeMap::new();
    let mut incr_spaces: BTreeMap<(usize, usize), Space> = BTreeMap::new();
    let mut init_spaces: BTreeMap<usize, Space> = BTreeMap::new();
    for row in &spaces_sec.rows {
        let mut cur = Cur::new(row);
        let kind = cur.next("a space kind")?;
        match kind.text.as_str() {
            "state" => {
                let t = kv_count(cur.next("t=..")?, "t")?;
                if !(1..=horizon + 1).contains(&t) {
                    return Err(semantic(kind.pos, format!("state time {t} outside 1..={}", horizon + 1)));
                }
                let name = cur.maybe_name().unwrap_or_else(|| canon_state(t));
                let space = read_space(&mut cur, name, kind.pos)?;
                if state_spaces.insert(t, space).is_some() {
                    return Err(semantic(kind.pos, format!("duplicate state space for t={t}")));
                }
            }
            "action" | "increment" => {
                let t = kv_count(cur.next("t=..")?, "t")?;
                if !(1..=horizon).contains(&t) {
                    return Err(semantic(kind.pos, format!("stage {t} outside 1..={horizon}")));
                }
                let who = cur.next("a player")?;
                let i = player_index(who)?;
                let is_action = kind.text == "action";
                let name = cur.maybe_name().unwrap_or_else(|| {
                    if is_action { canon_action(t, &players[i]) } else { canon_increment(t, &players[i]) }
                });
                let space = read_space(&mut cur, name, kind.pos)?;
                let map = if is_action { &mut action_spaces } else { &mut incr_spaces };
                if map.insert((t, i), space).is_some() {
                    return Err(semantic(kind.pos, format!("duplicate {} space at (t={t}, {})", kind.text, players[i])));
                }
            }
            "init" => {
                let who = cur.next("a player")?;
                let i = player_index(who)?;
                let name = cur.maybe_name().unwrap_or_else(|| canon_init(&players[i]));
                let space = read_space(&mut cur, name, kind.pos)?;
                if init_spaces.insert(i, space).is_some() {
                    return Err(semantic(kind.pos, format!("duplicate init space for {}", players[i])));
                }
            }
            other => return Err(semantic(kind.pos, format!("unknown space kind `{other}`"))),
        }
    }
    let mut states = Vec::new();
    for t in 1..=horizon + 1 {
        states.push(state_spaces.remove(&t).ok_or_else(|| {
            semantic(spaces_sec.pos, format!("missing state space for t={t}"))
        })?);
    }
    let mut actions = Vec::new();
    let mut increments = Vec::new();
    for t in 1..=horizon {
        let mut at = Vec::new();
        let mut zt = Vec::new();
        for i in 0..n {
            at.push(action_spaces.remove(&(t, i)).ok_or_else(|| {
                semantic(spaces_sec.pos, format!("missing action space (t={t}, {})", players[i]))
            })?);
            zt.push(incr_spaces.remove(&(t, i)).ok_or_else(|| {
                semantic(spaces_sec.pos, format!("missing increment space (t={t}, {})", players[i]))
            })?);
        }
        actions.push(at);
        increments.push(zt);
    }
    let mut initial_infos = Vec::new();
    for i in 0..n {
        initial_infos.push(init_spaces.remove(&i).ok_or_else(|| {
            semantic(spaces_sec.pos, format!("missing init space for {}", players[i]))
        })?);
    }

    // Recall projections: one row per player per stage.
    let mut recall = Vec::new();
    for t in 1..=horizon {
        let sec = recall_secs
            .remove(&t)
            .ok_or_else(|| semantic(DOC, format!("missing [recall t={t}] section")))?;
        let mut per_player: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for row in &sec.rows {
            let mut cur = Cur::new(row);
            let who = cur.next("a player")?;
            let i = player_index(who)?;
            cur.expect(":")?;
            let toks = cur.rest();
            let zn = increments[t - 1][i].len();
            if toks.len() != zn {
                return Err(semantic(
                    who.pos,
                    format!("recall row for {} needs {zn} entries, got {}", players[i], toks.len()),
                ));
            }
            let mut map = Vec::with_capacity(zn);
            for tok in toks {
                map.push(space_index(&actions[t - 1][i], tok, "action")?);
            }
            if per_player.insert(i, map).is_some() {
                return Err(semantic(who.pos, format!("duplicate recall row for {}", players[i])));
            }
        }
        let mut rt = Vec::new();
        for i in 0..n {
            rt.push(per_player.remove(&i).ok_or_else(|| {
                semantic(sec.pos, format!("missing recall row for {}", players[i]))
            })?);
        }
        recall.push(rt);
    }
    if let Some((t, sec)) = recall_secs.into_iter().next() {
        return Err(semantic(sec.pos, format!("recall stage {t} outside 1..={horizon}")));
    }

    // Initial law.
    let initial_sec = initial_sec.ok_or_else(|| semantic(DOC, "missing [initial] section"))?;
    let mut initial_law = Vec::new();
    for row in &initial_sec.rows {
        let mut cur = Cur::new(row);
        let x = space_index(&states[0], cur.next("a state label")?, "state")?;
        let mut infos = Vec::with_capacity(n);
        for i in 0..n {
            infos.push(space_index(&initial_infos[i], cur.next("an init label")?, "init")?);
        }
        cur.expect(":")?;
        let prob = parse_number(cur.next("a probability")?)?;
        cur.done()?;
        initial_law.push(InitialEntry { state: x, infos, prob });
    }

    // Kernels; rewards attach afterwards.
    let mut kernels: Vec<Vec<Vec<Vec<KernelEntry>>>> = Vec::new();
    for t in 1..=horizon {
        let sec = kernel_secs
            .remove(&t)
            .ok_or_else(|| semantic(DOC, format!("missing [kernel t={t}] section")))?;
        let xn = states[t - 1].len();
        let jn: usize = (0..n).map(|i| actions[t - 1][i].len()).product();
        let mut cells: Vec<Vec<Vec<KernelEntry>>> = vec![vec![Vec::new(); jn]; xn];
        for row in &sec.rows {
            let mut cur = Cur::new(row);
            let x = space_index(&states[t - 1], cur.next("a state label")?, "state")?;
            let mut ju = 0usize;
            for i in 0..n {
                let u = space_index(&actions[t - 1][i], cur.next("an action label")?, "action")?;
                ju = ju * actions[t - 1][i].len() + u;
            }
            cur.expect("->")?;
            let next_state =
                space_index(&states[t], cur.next("a next-state label")?, "state")?;
            let mut incs = Vec::with_capacity(n);
            for i in 0..n {
                incs.push(space_index(
                    &increments[t - 1][i],
                    cur.next("an increment label")?,
                    "increment",
                )?);
            }
            cur.expect(":")?;
            let prob = parse_number(cur.next("a probability")?)?;
            cur.done()?;
            cells[x][ju].push(KernelEntry {
                next_state,
                increments: incs,
                rewards: vec![0.0; n],
                prob,
            });
        }
        for x in 0..xn {
            for ju in 0..jn {
                if cells[x][ju].is_empty() {
                    return Err(semantic(
                        sec.pos,
                        format!(
                            "missing kernel row for (t={t}, x={}, u=({}))",
                            states[t - 1].label(x),
                            joint_labels(&actions[t - 1], ju)
                        ),
                    ));
                }
            }
        }
        kernels.push(cells);
    }
    if let Some((t, sec)) = kernel_secs.into_iter().next() {
        return Err(semantic(sec.pos, format!("kernel stage {t} outside 1..={horizon}")));
    }

    if let Some(sec) = rewards_sec {
        let mut seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        for row in &sec.rows {
            let mut cur = Cur::new(row);
            let t_tok = cur.next("t=..")?;
            let t = kv_count(t_tok, "t")?;
            if !(1..=horizon).contains(&t) {
                return Err(semantic(t_tok.pos, format!("reward stage {t} outside 1..={horizon}")));
            }
            let x = space_index(&states[t - 1], cur.next("a state label")?, "state")?;
            let mut ju = 0usize;
            for i in 0..n {
                let u = space_index(&actions[t - 1][i], cur.next("an action label")?, "action")?;
                ju = ju * actions[t - 1][i].len() + u;
            }
            cur.expect(":")?;
            let mut rewards = Vec::with_capacity(n);
            for _ in 0..n {
                rewards.push(parse_number(cur.next("a reward")?)?);
            }
            cur.done()?;
            if !seen.insert((t, x, ju)) {
                return Err(semantic(
                    t_tok.pos,
                    format!(
                        "duplicate reward row for (t={t}, x={}, u=({}))",
                        states[t - 1].label(x),
                        joint_labels(&actions[t - 1], ju)
                    ),
                ));
            }
            for entry in &mut kernels[t - 1][x][ju] {
                entry.rewards = rewards.clone();
            }
        }
    }

    let def = GameDef {
        players,
        horizon,
        states,
        actions,
        increments,
        initial_infos,
        recall,
        initial_law,
        kernels,
        support_cap,
    };
    let game = validate_game(def)?;
    let players = &game.def().players;

    // Summary maps.
    let mut comps: BTreeMap<usize, Compression> = BTreeMap::new();
    for sec in &comp_secs {
        let who = sec.arg("i")?;
        let i = players
            .iter()
            .position(|p| p == who)
            .ok_or_else(|| semantic(sec.pos, format!("unknown player `{who}`")))?;
        if comps.contains_key(&i) {
            return Err(semantic(sec.pos, format!("duplicate [compression i={who}] section")));
        }
        comps.insert(i, parse_compression(&game, i, sec)?);
    }
    let compressions = if comps.is_empty() {
        None
    } else {
        for (i, p) in players.iter().enumerate() {
            if !comps.contains_key(&i) {
                return Err(semantic(DOC, format!("missing [compression i={p}] section")));
            }
        }
        let profile =
            CompressionProfile { compressions: comps.into_values().collect() };
        profile
            .validate(&game)
            .map_err(|e| semantic(comp_secs[0].pos, e.to_string()))?;
        Some(profile)
    };

    let mut strategies = BTreeMap::new();
    for sec in &strategy_secs {
        let name = sec.arg("name")?.to_string();
        if strategies.contains_key(&name) {
            return Err(semantic(sec.pos, format!("duplicate [strategy name={name}] section")));
        }
        strategies.insert(name, parse_strategy(&game, sec)?);
    }

    let mut beliefs = BTreeMap::new();
    for sec in &belief_secs {
        let name = sec.arg("name")?.to_string();
        if beliefs.contains_key(&name) {
            return Err(semantic(sec.pos, format!("duplicate [belief name={name}] section")));
        }
        beliefs.insert(name, parse_beliefs(&game, sec)?);
    }

    let mut splits = BTreeMap::new();
    for sec in &split_secs {
        let name = sec.arg("name")?.to_string();
        if splits.contains_key(&name) {
            return Err(semantic(sec.pos, format!("duplicate [split name={name}] section")));
        }
        splits.insert(name, parse_split(&game, sec)?);
    }

    Ok(GameDocument { game, compressions, strategies, beliefs, splits })
}

fn read_space(cur: &mut Cur<'_>, name: String, pos: Pos) -> Result<Space, ParseError> {
    cur.expect(":")?;
    let toks = cur.rest();
    if toks.is_empty() {
        return Err(semantic(pos, "a space needs at least one label"));
    }
    let space = Space::new(name, toks.iter().map(|t| t.text.clone()).collect());
    if !space.well_formed() {
        return Err(semantic(pos, format!("space {} repeats a label", space.name)));
    }
    Ok(space)
}

fn joint_labels(spaces: &[Space], mut ju: usize) -> String {
    let mut parts = vec![String::new(); spaces.len()];
    for (i, s) in spaces.iter().enumerate().rev() {
        parts[i] = s.label(ju % s.len()).to_string();
        ju /= s.len();
    }
    parts.join(", ")
}

fn parse_history(
    game: &GameSpec,
    i: usize,
    t: usize,
    tok: &Tok,
    path: &str,
) -> Result<usize, ParseError> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.len() != t {
        return Err(semantic(
            tok.pos,
            format!("history at time {t} needs {t} components, got {}", parts.len()),
        ));
    }
    let init = game.initial_info_space(i);
    let mut h = init.index_of(parts[0]).ok_or_else(|| {
        semantic(tok.pos, format!("unknown init label `{}` in {}", parts[0], init.name))
    })?;
    for stage in 1..t {
        let zs = game.increment_space(stage, i);
        let z = zs.index_of(parts[stage]).ok_or_else(|| {
            semantic(tok.pos, format!("unknown increment label `{}` in {}", parts[stage], zs.name))
        })?;
        h = history_extend(game, i, stage, h, z);
    }
    Ok(h)
}

fn parse_compression(
    game: &GameSpec,
    i: usize,
    sec: &RawSection,
) -> Result<Compression, ParseError> {
    let horizon = game.horizon();
    let player = game.player_name(i).to_string();
    let mut spaces_by_t: BTreeMap<usize, Space> = BTreeMap::new();
    // Space rows resolve first so init/update rows can use their labels.
    for row in &sec.rows {
        if row[0].text != "space" || row[0].quoted {
            continue;
        }
        let mut cur = Cur::new(row);
        cur.next("space")?;
        let t = kv_count(cur.next("t=..")?, "t")?;
        if !(1..=horizon + 1).contains(&t) {
            return Err(semantic(row[0].pos, format!("summary time {t} outside 1..={}", horizon + 1)));
        }
        let name = cur.maybe_name().unwrap_or_else(|| canon_comp(t, &player));
        let space = read_space(&mut cur, name, row[0].pos)?;
        if spaces_by_t.insert(t, space).is_some() {
            return Err(semantic(row[0].pos, format!("duplicate summary space for t={t}")));
        }
    }
    let mut spaces = Vec::new();
    for t in 1..=horizon + 1 {
        spaces.push(spaces_by_t.remove(&t).ok_or_else(|| {
            semantic(sec.pos, format!("missing summary space for t={t}"))
        })?);
    }

    let mut init_map: Option<Vec<usize>> = None;
    let mut updates_by_key: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for row in &sec.rows {
        let mut cur = Cur::new(row);
        let kind = cur.next("a row kind")?;
        match kind.text.as_str() {
            "space" => continue,
            "init" => {
                if init_map.is_some() {
                    return Err(semantic(kind.pos, "duplicate init row"));
                }
                cur.expect(":")?;
                let toks = cur.rest();
                let hn = game.initial_info_space(i).len();
                if toks.len() != hn {
                    return Err(semantic(
                        kind.pos,
                        format!("init row needs {hn} entries, got {}", toks.len()),
                    ));
                }
                let mut map = Vec::with_capacity(hn);
                for tok in toks {
                    map.push(space_index(&spaces[0], tok, "summary")?);
                }
                init_map = Some(map);
            }
            "update" => {
                let t = kv_count(cur.next("t=..")?, "t")?;
                if !(1..=horizon).contains(&t) {
                    return Err(semantic(kind.pos, format!("update stage {t} outside 1..={horizon}")));
                }
                let k_tok = cur.next("k=..")?;
                let k_label = kv(k_tok, "k")?;
                let k = spaces[t - 1].index_of(k_label).ok_or_else(|| {
                    semantic(k_tok.pos, format!("unknown summary label `{k_label}` in {}", spaces[t - 1].name))
                })?;
                cur.expect(":")?;
                let toks = cur.rest();
                let zn = game.increment_space(t, i).len();
                if toks.len() != zn {
                    return Err(semantic(
                        kind.pos,
                        format!("update row needs {zn} entries, got {}", toks.len()),
                    ));
                }
                let mut map = Vec::with_capacity(zn);
                for tok in toks {
                    map.push(space_index(&spaces[t], tok, "summary")?);
                }
                if updates_by_key.insert((t, k), map).is_some() {
                    return Err(semantic(kind.pos, format!("duplicate update row (t={t}, k={k_label})")));
                }
            }
            other => return Err(semantic(kind.pos, format!("unknown compression row `{other}`"))),
        }
    }
    let init_map = init_map.ok_or_else(|| semantic(sec.pos, "missing init row"))?;
    let mut updates = Vec::new();
    for t in 1..=horizon {
        let kn = spaces[t - 1].len();
        let mut ut = Vec::with_capacity(kn);
        for k in 0..kn {
            ut.push(updates_by_key.remove(&(t, k)).ok_or_else(|| {
                semantic(
                    sec.pos,
                    format!("missing update row (t={t}, k={})", spaces[t - 1].label(k)),
                )
            })?);
        }
        updates.push(ut);
    }
    let comp = Compression { player: i, spaces, init_map, updates };
    comp.validate(game).map_err(|e| semantic(sec.pos, e.to_string()))?;
    Ok(comp)
}

fn parse_strategy(game: &GameSpec, sec: &RawSection) -> Result<StrategyProfile, ParseError> {
    let mut profile = StrategyProfile::uniform(game);
    let mut seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    for row in &sec.rows {
        let mut cur = Cur::new(row);
        let who = cur.next("a player")?;
        let i = game
            .def()
            .players
            .iter()
            .position(|p| *p == who.text)
            .ok_or_else(|| semantic(who.pos, format!("unknown player `{}`", who.text)))?;
        let t = kv_count(cur.next("t=..")?, "t")?;
        if !(1..=game.horizon()).contains(&t) {
            return Err(semantic(who.pos, format!("stage {t} outside 1..={}", game.horizon())));
        }
        let h_tok = cur.next("h=..")?;
        let h = parse_history(game, i, t, h_tok, kv(h_tok, "h")?)?;
        cur.expect(":")?;
        let toks = cur.rest();
        let un = game.action_space(t, i).len();
        if toks.len() != un {
            return Err(semantic(
                who.pos,
                format!("strategy row needs {un} probabilities, got {}", toks.len()),
            ));
        }
        let mut p = Vec::with_capacity(un);
        for tok in toks {
            p.push(parse_number(tok)?);
        }
        if !seen.insert((i, t, h)) {
            return Err(semantic(who.pos, "duplicate strategy row"));
        }
        profile.strategies[i].tables[t - 1][h] = p;
    }
    profile.validate(game).map_err(|e| semantic(sec.pos, e.to_string()))?;
    Ok(profile)
}

fn parse_beliefs(game: &GameSpec, sec: &RawSection) -> Result<BeliefSystem, ParseError> {
    let n = game.num_players();
    let horizon = game.horizon();
    let mut beliefs: BeliefSystem = (0..n)
        .map(|i| {
            (1..=horizon)
                .map(|t| {
                    let dim: usize = belief_dims(game, i, t).iter().product();
                    vec![vec![0.0; dim]; game.history_count(i, t)]
                })
                .collect()
        })
        .collect();
    let mut seen: BTreeSet<(usize, usize, usize, usize)> = BTreeSet::new();
    for row in &sec.rows {
        let mut cur = Cur::new(row);
        let who = cur.next("a player")?;
        let i = game
            .def()
            .players
            .iter()
            .position(|p| *p == who.text)
            .ok_or_else(|| semantic(who.pos, format!("unknown player `{}`", who.text)))?;
        let t = kv_count(cur.next("t=..")?, "t")?;
        if !(1..=horizon).contains(&t) {
            return Err(semantic(who.pos, format!("stage {t} outside 1..={horizon}")));
        }
        let h_tok = cur.next("h=..")?;
        let h = parse_history(game, i, t, h_tok, kv(h_tok, "h")?)?;
        let x_tok = cur.next("x=..")?;
        let xs = game.state_space(t);
        let x_label = kv(x_tok, "x")?;
        let x = xs.index_of(x_label).ok_or_else(|| {
            semantic(x_tok.pos, format!("unknown state label `{x_label}` in {}", xs.name))
        })?;
        // One history path per other player, in player order.
        let mut idx = x;
        for j in 0..n {
            if j == i {
                continue;
            }
            let j_tok = cur.next("another player's history")?;
            let path = kv(j_tok, game.player_name(j))?;
            let hj = parse_history(game, j, t, j_tok, path)?;
            idx = idx * game.history_count(j, t) + hj;
        }
        cur.expect(":")?;
        let p = parse_number(cur.next("a probability")?)?;
        cur.done()?;
        if !seen.insert((i, t, h, idx)) {
            return Err(semantic(who.pos, "duplicate belief atom"));
        }
        beliefs[i][t - 1][h][idx] = p;
    }
    Ok(beliefs)
}

fn parse_split(game: &GameSpec, sec: &RawSection) -> Result<CommonInfoSplit, ParseError> {
    let n = game.num_players();
    let horizon = game.horizon();
    let mut codes: Vec<Vec<Vec<Option<(usize, usize)>>>> = (0..n)
        .map(|i| (1..=horizon).map(|t| vec![None; game.history_count(i, t)]).collect())
        .collect();
    for row in &sec.rows {
        let mut cur = Cur::new(row);
        let who = cur.next("a player")?;
        let i = game
            .def()
            .players
            .iter()
            .position(|p| *p == who.text)
            .ok_or_else(|| semantic(who.pos, format!("unknown player `{}`", who.text)))?;
        let t = kv_count(cur.next("t=..")?, "t")?;
        if !(1..=horizon).contains(&t) {
            return Err(semantic(who.pos, format!("stage {t} outside 1..={horizon}")));
        }
        let h_tok = cur.next("h=..")?;
        let h = parse_history(game, i, t, h_tok, kv(h_tok, "h")?)?;
        cur.expect(":")?;
        let common = parse_count(cur.next("a common code")?, "a common code")?;
        let private = parse_count(cur.next("a private code")?, "a private code")?;
        cur.done()?;
        if codes[i][t - 1][h].replace((common, private)).is_some() {
            return Err(semantic(who.pos, "duplicate split row"));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (i, per_t) in codes.into_iter().enumerate() {
        let mut player_codes = Vec::with_capacity(horizon);
        for (ti, row) in per_t.into_iter().enumerate() {
            let mut filled = Vec::with_capacity(row.len());
            for (h, c) in row.into_iter().enumerate() {
                filled.push(c.ok_or_else(|| {
                    semantic(
                        sec.pos,
                        format!(
                            "missing split row for {} t={} h={}",
                            game.player_name(i),
                            ti + 1,
                            render_history(game, i, ti + 1, h)
                        ),
                    )
                })?);
            }
            player_codes.push(filled);
        }
        out.push(player_codes);
    }
    let split = CommonInfoSplit { codes: out };
    split.validate(game).map_err(|e| semantic(sec.pos, e.to_string()))?;
    Ok(split)
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

/// Shortest faithful rendering: exact small fraction if one reproduces the
/// value, otherwise the shortest round-tripping decimal.
fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    for q in 1..=64u32 {
        let p = (v * f64::from(q)).round();
        if p.abs() <= 1_000_000.0 && p / f64::from(q) == v {
            return if q == 1 {
                format!("{}", p as i64)
            } else {
                format!("{}/{q}", p as i64)
            };
        }
    }
    format!("{v:?}")
}

fn check_token(s: &str, what: &str) -> Result<(), SerializeError> {
    let reserved = ['.', '=', ':', '#', '[', ']', '"'];
    if s.is_empty()
        || s == "->"
        || s.chars().any(|c| c.is_whitespace() || reserved.contains(&c))
    {
        return Err(SerializeError::Unrepresentable(format!(
            "{what} `{s}` is empty or uses a reserved character"
        )));
    }
    Ok(())
}

fn check_name(s: &str, what: &str) -> Result<(), SerializeError> {
    if s.contains('"') || s.contains('\n') {
        return Err(SerializeError::Unrepresentable(format!(
            "{what} `{s}` cannot carry quotes or newlines"
        )));
    }
    Ok(())
}

fn space_tokens(space: &Space, canonical: &str, what: &str) -> Result<String, SerializeError> {
    check_name(&space.name, "space name")?;
    let mut out = String::new();
    if space.name != canonical {
        out.push_str(&format!("\"{}\" ", space.name));
    }
    out.push(':');
    for idx in 0..space.len() {
        let l = space.label(idx);
        check_token(l, what)?;
        out.push(' ');
        out.push_str(l);
    }
    Ok(out)
}

fn render_history(game: &GameSpec, i: usize, t: usize, h: usize) -> String {
    let mut comps = Vec::new();
    let mut cur = h;
    for stage in (1..t).rev() {
        let zs = game.increment_space(stage, i);
        comps.push(zs.label(cur % zs.len()).to_string());
        cur /= zs.len();
    }
    let mut parts = vec![game.initial_info_space(i).label(cur).to_string()];
    comps.reverse();
    parts.extend(comps);
    parts.join(".")
}

fn check_history_labels(game: &GameSpec) -> Result<(), SerializeError> {
    for i in 0..game.num_players() {
        let init = game.initial_info_space(i);
        for idx in 0..init.len() {
            check_token(init.label(idx), "init label")?;
        }
    }
    Ok(())
}

pub fn serialize_gamespec(doc: &GameDocument) -> Result<String, SerializeError> {
    let game = &doc.game;
    let def = game.def();
    let n = def.players.len();
    let mut out = String::new();

    for p in &def.players {
        check_token(p, "player name")?;
    }
    check_history_labels(game)?;

    out.push_str("[players]\n");
    out.push_str(&def.players.join(" "));
    out.push_str("\n\n[horizon]\n");
    out.push_str(&def.horizon.to_string());
    out.push('\n');
    if def.support_cap != DEFAULT_SUPPORT_CAP {
        out.push_str(&format!("\n[support-cap]\n{}\n", def.support_cap));
    }

    out.push_str("\n[spaces]\n");
    for (ti, s) in def.states.iter().enumerate() {
        let t = ti + 1;
        out.push_str(&format!(
            "state t={t} {}\n",
            space_tokens(s, &canon_state(t), "state label")?
        ));
    }
    for t in 1..=def.horizon {
        for i in 0..n {
            out.push_str(&format!(
                "action t={t} {} {}\n",
                def.players[i],
                space_tokens(&def.actions[t - 1][i], &canon_action(t, &def.players[i]), "action label")?
            ));
        }
    }
    for t in 1..=def.horizon {
        for i in 0..n {
            out.push_str(&format!(
                "increment t={t} {} {}\n",
                def.players[i],
                space_tokens(
                    &def.increments[t - 1][i],
                    &canon_increment(t, &def.players[i]),
                    "increment label"
                )?
            ));
        }
    }
    for i in 0..n {
        out.push_str(&format!(
            "init {} {}\n",
            def.players[i],
            space_tokens(&def.initial_infos[i], &canon_init(&def.players[i]), "init label")?
        ));
    }

    for t in 1..=def.horizon {
        out.push_str(&format!("\n[recall t={t}]\n"));
        for i in 0..n {
            let mut row = format!("{} :", def.players[i]);
            for &u in &def.recall[t - 1][i] {
                row.push(' ');
                row.push_str(def.actions[t - 1][i].label(u));
            }
            out.push_str(&row);
            out.push('\n');
        }
    }

    out.push_str("\n[initial]\n");
    for e in &def.initial_law {
        let mut row = def.states[0].label(e.state).to_string();
        for (i, &h) in e.infos.iter().enumerate() {
            row.push(' ');
            row.push_str(def.initial_infos[i].label(h));
        }
        out.push_str(&format!("{row} : {}\n", fmt_f64(e.prob)));
    }

    // Rewards must be constant inside each (t, x, u) cell to fit the format.
    let mut reward_rows = Vec::new();
    for t in 1..=def.horizon {
        out.push_str(&format!("\n[kernel t={t}]\n"));
        let jn: usize = (0..n).map(|i| def.actions[t - 1][i].len()).product();
        for x in 0..def.states[t - 1].len() {
            for ju in 0..jn {
                let cell = &def.kernels[t - 1][x][ju];
                let mut lhs = def.states[t - 1].label(x).to_string();
                let mut rest = ju;
                let mut us = vec![0usize; n];
                for i in (0..n).rev() {
                    us[i] = rest % def.actions[t - 1][i].len();
                    rest /= def.actions[t - 1][i].len();
                }
                for i in 0..n {
                    lhs.push(' ');
                    lhs.push_str(def.actions[t - 1][i].label(us[i]));
                }
                for entry in cell {
                    let mut rhs = def.states[t].label(entry.next_state).to_string();
                    for (i, &z) in entry.increments.iter().enumerate() {
                        rhs.push(' ');
                        rhs.push_str(def.increments[t - 1][i].label(z));
                    }
                    out.push_str(&format!("{lhs} -> {rhs} : {}\n", fmt_f64(entry.prob)));
                    if entry.rewards != cell[0].rewards {
                        return Err(SerializeError::Unrepresentable(format!(
                            "rewards vary inside kernel cell (t={t}, x={}, u=({}))",
                            def.states[t - 1].label(x),
                            joint_labels(&def.actions[t - 1], ju)
                        )));
                    }
                }
                if !cell.is_empty() && cell[0].rewards.iter().any(|&r| r != 0.0) {
                    let rewards: Vec<String> =
                        cell[0].rewards.iter().map(|&r| fmt_f64(r)).collect();
                    reward_rows.push(format!("t={t} {lhs} : {}", rewards.join(" ")));
                }
            }
        }
    }
    if !reward_rows.is_empty() {
        out.push_str("\n[rewards]\n");
        for row in reward_rows {
            out.push_str(&row);
            out.push('\n');
        }
    }

    if let Some(profile) = &doc.compressions {
        for comp in &profile.compressions {
            let i = comp.player;
            out.push_str(&format!("\n[compression i={}]\n", def.players[i]));
            for (ti, s) in comp.spaces.iter().enumerate() {
                let t = ti + 1;
                out.push_str(&format!(
                    "space t={t} {}\n",
                    space_tokens(s, &canon_comp(t, &def.players[i]), "summary label")?
                ));
            }
            let mut row = "init :".to_string();
            for &k in &comp.init_map {
                row.push(' ');
                row.push_str(comp.spaces[0].label(k));
            }
            out.push_str(&row);
            out.push('\n');
            for t in 1..=def.horizon {
                for (k, zs) in comp.updates[t - 1].iter().enumerate() {
                    let mut row =
                        format!("update t={t} k={} :", comp.spaces[t - 1].label(k));
                    for &k2 in zs {
                        row.push(' ');
                        row.push_str(comp.spaces[t].label(k2));
                    }
                    out.push_str(&row);
                    out.push('\n');
                }
            }
        }
    }

    for (name, profile) in &doc.strategies {
        check_token(name, "strategy name")?;
        out.push_str(&format!("\n[strategy name={name}]\n"));
        for i in 0..n {
            for t in 1..=def.horizon {
                for (h, p) in profile.strategies[i].tables[t - 1].iter().enumerate() {
                    let probs: Vec<String> = p.iter().map(|&v| fmt_f64(v)).collect();
                    out.push_str(&format!(
                        "{} t={t} h={} : {}\n",
                        def.players[i],
                        render_history(game, i, t, h),
                        probs.join(" ")
                    ));
                }
            }
        }
    }

    for (name, beliefs) in &doc.beliefs {
        check_token(name, "belief name")?;
        out.push_str(&format!("\n[belief name={name}]\n"));
        for i in 0..n {
            for t in 1..=def.horizon {
                for (h, row) in beliefs[i][t - 1].iter().enumerate() {
                    for (idx, &p) in row.iter().enumerate() {
                        if p == 0.0 {
                            continue;
                        }
                        // Unfold (x, others' histories), later fastest.
                        let mut rest = idx;
                        let mut others = Vec::new();
                        for j in (0..n).rev() {
                            if j == i {
                                continue;
                            }
                            let hn = game.history_count(j, t);
                            others.push((j, rest % hn));
                            rest /= hn;
                        }
                        others.reverse();
                        let x = rest;
                        let mut line = format!(
                            "{} t={t} h={} x={}",
                            def.players[i],
                            render_history(game, i, t, h),
                            game.state_space(t).label(x)
                        );
                        for (j, hj) in others {
                            line.push_str(&format!(
                                " {}={}",
                                def.players[j],
                                render_history(game, j, t, hj)
                            ));
                        }
                        out.push_str(&format!("{line} : {}\n", fmt_f64(p)));
                    }
                }
            }
        }
    }

    for (name, split) in &doc.splits {
        check_token(name, "split name")?;
        out.push_str(&format!("\n[split name={name}]\n"));
        for i in 0..n {
            for t in 1..=def.horizon {
                for (h, &(c, p)) in split.codes[i][t - 1].iter().enumerate() {
                    out.push_str(&format!(
                        "{} t={t} h={} : {c} {p}\n",
                        def.players[i],
                        render_history(game, i, t, h)
                    ));
                }
            }
        }
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyngame_core::fixtures::{build_example, random_small_game, standard_suite, FixtureRequest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn doc_for(req: &FixtureRequest) -> GameDocument {
        let fx = build_example(req).unwrap();
        let mut doc = GameDocument::plain(fx.game);
        doc.compressions = Some(fx.compressions);
        doc
    }

    #[test]
    fn standard_suite_round_trips() {
        for req in standard_suite() {
            let doc = doc_for(&req);
            let text = serialize_gamespec(&doc).unwrap();
            let parsed = parse_gamespec(&text).unwrap();
            assert_eq!(parsed.game.def(), doc.game.def(), "{req:?}");
            assert_eq!(
                parsed.compressions.as_ref().unwrap(),
                doc.compressions.as_ref().unwrap(),
                "{req:?}"
            );
            // Identity again on the second pass: same abstract content.
            let text2 = serialize_gamespec(&parsed).unwrap();
            assert_eq!(text, text2, "{req:?}");
        }
    }

    #[test]
    fn strategies_beliefs_and_splits_round_trip() {
        let fx = build_example(&FixtureRequest::Example3 { c: 0.2 }).unwrap();
        let mut doc = GameDocument::plain(fx.game.clone());
        let mut profile = StrategyProfile::uniform(&fx.game);
        profile.strategies[0].tables[0] =
            vec![vec![1.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 1.0 / 3.0]];
        doc.strategies.insert("closed".to_string(), profile);
        doc.splits.insert("cib".to_string(), fx.split.clone().unwrap());
        let text = serialize_gamespec(&doc).unwrap();
        let parsed = parse_gamespec(&text).unwrap();
        assert_eq!(
            parsed.strategies["closed"].strategies[0].tables,
            doc.strategies["closed"].strategies[0].tables
        );
        assert_eq!(parsed.splits["cib"].codes, doc.splits["cib"].codes);

        let fx2 = build_example(&FixtureRequest::Example2).unwrap();
        let assessment = fx2.assessment.clone().unwrap();
        let mut doc2 = GameDocument::plain(fx2.game);
        doc2.strategies.insert("wpbe".to_string(), assessment.profile.clone());
        doc2.beliefs.insert("wpbe".to_string(), assessment.beliefs.clone());
        let text2 = serialize_gamespec(&doc2).unwrap();
        let parsed2 = parse_gamespec(&text2).unwrap();
        let back = parsed2.assessment("wpbe", "wpbe").unwrap();
        assert_eq!(back.beliefs, assessment.beliefs);
        assert_eq!(
            back.profile.strategies[1].tables,
            assessment.profile.strategies[1].tables
        );
    }

    #[test]
    fn fractions_parse_to_exact_quotients() {
        let doc = doc_for(&FixtureRequest::Example3 { c: 0.2 });
        let text = serialize_gamespec(&doc).unwrap();
        assert!(text.contains(" 1/2"), "probabilities render as fractions:\n{text}");
        let parsed = parse_gamespec(&text).unwrap();
        let law = &parsed.game.def().initial_law;
        assert_eq!(law[0].prob, 0.5);
        assert_eq!(law[0].prob, 1.0f64 / 2.0f64);
    }

    #[test]
    fn missing_kernel_row_names_the_cell() {
        let doc = doc_for(&FixtureRequest::Example1);
        let text = serialize_gamespec(&doc).unwrap();
        let pruned: String = text
            .lines()
            .filter(|l| !(l.starts_with("* 1 *") && l.contains("->")))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_ne!(pruned, text, "one kernel row should have been removed");
        let err = parse_gamespec(&pruned).unwrap_err();
        match err {
            ParseError::Semantic { msg, .. } => {
                assert!(msg.contains("t=1") && msg.contains("x=*") && msg.contains("u=(1"), "{msg}");
            }
            other => panic!("expected a semantic error, got {other}"),
        }
    }

    #[test]
    fn diagnostics_carry_line_and_column() {
        let doc = doc_for(&FixtureRequest::Example1);
        let text = serialize_gamespec(&doc).unwrap();
        let broken = text.replacen("[initial]\n* * *", "[initial]\n* * oops", 1);
        assert_ne!(broken, text);
        let err = parse_gamespec(&broken).unwrap_err();
        let ParseError::Semantic { pos, msg } = err else {
            panic!("expected a semantic error, got {err}");
        };
        assert!(msg.contains("oops"), "{msg}");
        let line = broken.lines().nth(pos.line - 1).unwrap();
        assert_eq!(line.chars().nth(pos.col - 1).unwrap(), 'o', "{pos} in {line}");
    }

    #[test]
    fn per_atom_rewards_are_unrepresentable() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let game = dyngame_core::game::validate_game(random_small_game(&mut rng)).unwrap();
        let doc = GameDocument::plain(game);
        // Random cells draw fresh rewards per outcome, which the (t, x, u)
        // reward table cannot express.
        match serialize_gamespec(&doc) {
            Err(SerializeError::Unrepresentable(msg)) => {
                assert!(msg.contains("rewards vary"), "{msg}")
            }
            Ok(_) => panic!("expected an unrepresentable-rewards error"),
        }
    }

    #[test]
    fn content_before_header_is_rejected() {
        let err = parse_gamespec("alice bob\n[players]\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }), "{err}");
    }

    #[test]
    fn bad_probability_sum_is_a_validation_error() {
        let doc = doc_for(&FixtureRequest::Example1);
        let text = serialize_gamespec(&doc).unwrap();
        let broken = text.replace("* * * : 1\n", "* * * : 3/4\n");
        assert_ne!(broken, text);
        let err = parse_gamespec(&broken).unwrap_err();
        assert!(matches!(err, ParseError::Validation(_)), "{err}");
    }
}
