//! Interactive move shell.
//!
//! Reads one command per line from stdin:
//!
//! * move syntax: `I <i>`, `R <i> <j> <s>`, `C <i> <k> <s>`
//! * `slide <i> <j> <g> <e1> <e2> <c>` -- words in compact form or as
//!   comma-separated signed indices (`+1,-2`), `1` for the identity;
//!   applied as its elementary-move decomposition
//! * `undo` -- revert the last command
//! * `show` -- reprint the current state
//! * `save <path>` -- write the session as a certificate
//! * `quit` / `exit` / end of input -- leave
//!
//! After every state change the current presentation and its canonical
//! form are printed to stdout; prompts and errors go to stderr so the
//! output stream stays parseable.

use std::io::{BufRead, Write};

use ac_core::moves::{replay, slide_decomposition, Move, SlideSpec};
use ac_core::presentation::Presentation;
use ac_core::search::Certificate;
use ac_core::word::{Sign, Word};

use crate::Failure;

struct Session {
    start: Presentation,
    current: Presentation,
    /// One entry per command; each holds the elementary moves it applied.
    history: Vec<Vec<Move>>,
}

impl Session {
    fn moves(&self) -> Vec<Move> {
        self.history.iter().flatten().copied().collect()
    }

    fn apply(&mut self, moves: Vec<Move>) -> Result<(), String> {
        let next = replay(&self.current, &moves).map_err(|e| e.to_string())?;
        self.current = next;
        self.history.push(moves);
        Ok(())
    }

    fn undo(&mut self) -> bool {
        if self.history.pop().is_none() {
            return false;
        }
        self.current = replay(&self.start, &self.moves()).expect("history replays");
        true
    }

    fn print_state(&self) {
        println!("presentation: {}", self.current.format_single_line());
        println!(
            "canonical: {}",
            self.current
                .canonicalize()
                .to_presentation()
                .format_single_line()
        );
    }

    fn certificate(&self) -> Certificate {
        Certificate {
            rank: self.start.rank(),
            start: self.start.clone(),
            moves: self.moves(),
            end: self.current.clone(),
        }
    }
}

pub fn run(start: Presentation) -> Result<(), Failure> {
    let mut session = Session {
        start: start.clone(),
        current: start,
        history: Vec::new(),
    };
    session.print_state();

    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        eprint!("> ");
        let _ = std::io::stderr().flush();
        let Some(line) = lines.next() else { break };
        let line = line.map_err(|e| Failure::Input(format!("reading stdin: {e}")))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match dispatch(&mut session, trimmed) {
            Ok(Action::Continue) => {}
            Ok(Action::Quit) => break,
            Err(msg) => eprintln!("error: {msg}"),
        }
    }
    Ok(())
}

enum Action {
    Continue,
    Quit,
}

fn dispatch(session: &mut Session, line: &str) -> Result<Action, String> {
    let mut fields = line.split_whitespace();
    let head = fields.next().expect("line is nonempty");
    match head {
        "quit" | "exit" => return Ok(Action::Quit),
        "show" => {
            session.print_state();
            return Ok(Action::Continue);
        }
        "undo" => {
            if session.undo() {
                session.print_state();
            } else {
                return Err("nothing to undo".into());
            }
            return Ok(Action::Continue);
        }
        "save" => {
            let path = fields.next().ok_or("usage: save <path>")?;
            let cert = session.certificate();
            std::fs::write(path, cert.format()).map_err(|e| format!("writing {path}: {e}"))?;
            println!("saved: {path}");
            return Ok(Action::Continue);
        }
        "slide" => {
            let args: Vec<&str> = fields.collect();
            if args.len() != 6 {
                return Err("usage: slide <i> <j> <g> <e1> <e2> <c>".into());
            }
            let rank = session.current.rank();
            let spec = SlideSpec {
                target: parse_index(args[0])?,
                other: parse_index(args[1])?,
                path: parse_word(args[2], rank)?,
                target_sign: parse_sign(args[3])?,
                other_sign: parse_sign(args[4])?,
                conjugator: parse_word(args[5], rank)?,
            };
            let moves =
                slide_decomposition(&spec, rank).map_err(|e| e.to_string())?;
            session.apply(moves)?;
            session.print_state();
            return Ok(Action::Continue);
        }
        _ => {}
    }
    // Anything else must be elementary move syntax.
    let mv = Move::parse(line).map_err(|e| e.to_string())?;
    session.apply(vec![mv])?;
    session.print_state();
    Ok(Action::Continue)
}

fn parse_index(text: &str) -> Result<u16, String> {
    text.parse::<u16>()
        .ok()
        .filter(|&v| v >= 1)
        .ok_or_else(|| format!("invalid relator index {text:?}"))
}

fn parse_sign(text: &str) -> Result<Sign, String> {
    match text {
        "+1" => Ok(Sign::Plus),
        "-1" => Ok(Sign::Minus),
        _ => Err(format!("invalid sign {text:?} (expected +1 or -1)")),
    }
}

fn parse_word(text: &str, rank: u16) -> Result<Word, String> {
    let spaced = text.replace(',', " ");
    Word::parse(&spaced, rank).map_err(|e| e.to_string())
}
