//! Framework process templates, one per kind of SCJ component.
//!
//! Each template is a process parametrised by the component identifier
//! `id`. The safelet and periodic-handler templates follow the published
//! figures; the sequencer, mission and aperiodic-handler bodies are
//! NON-NORMATIVE reconstructions of the select/initialise/execute/terminate
//! cycle.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::ast::*;
use crate::parser;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameworkKind {
    SafeletFW,
    SequencerFW,
    MissionFW,
    PEHFW,
    APEHFW,
}

impl FrameworkKind {
    pub const ALL: [FrameworkKind; 5] = [
        FrameworkKind::SafeletFW,
        FrameworkKind::SequencerFW,
        FrameworkKind::MissionFW,
        FrameworkKind::PEHFW,
        FrameworkKind::APEHFW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameworkKind::SafeletFW => "SafeletFW",
            FrameworkKind::SequencerFW => "SequencerFW",
            FrameworkKind::MissionFW => "MissionFW",
            FrameworkKind::PEHFW => "PEHFW",
            FrameworkKind::APEHFW => "APEHFW",
        }
    }

    fn template(self) -> &'static str {
        match self {
            FrameworkKind::SafeletFW => SAFELET_FW,
            FrameworkKind::SequencerFW => SEQUENCER_FW,
            FrameworkKind::MissionFW => MISSION_FW,
            FrameworkKind::PEHFW => PEH_FW,
            FrameworkKind::APEHFW => APEH_FW,
        }
    }

    /// Channels the template engages on.
    pub fn interface(self) -> BTreeSet<String> {
        let names: &[&str] = match self {
            FrameworkKind::SafeletFW => &[
                "safeletInitializeCall",
                "safeletInitializeRet",
                "getSequencerCall",
                "getSequencerRet",
                "start_sequencer",
                "done_sequencer",
                "end_safelet_app",
            ],
            FrameworkKind::SequencerFW => &[
                "start_sequencer",
                "getNextMissionCall",
                "getNextMissionRet",
                "start_mission",
                "done_mission",
                "end_sequencer_app",
                "done_sequencer",
            ],
            FrameworkKind::MissionFW => &[
                "start_mission",
                "missionInitializeCall",
                "missionInitializeRet",
                "startHandlersCall",
                "startHandlersRet",
                "requestTerminationCall",
                "requestTerminationRet",
                "terminateHandlersCall",
                "terminateHandlersRet",
                "cleanupCall",
                "cleanupRet",
                "done_mission",
            ],
            FrameworkKind::PEHFW => &["start_peh", "handleAsyncEventCall", "handleAsyncEventRet", "done_handler"],
            FrameworkKind::APEHFW => {
                &["start_apeh", "release", "handleAsyncEventCall", "handleAsyncEventRet", "done_handler"]
            }
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    /// The parametrised declaration `process <Kind> = id : ID @ ...`.
    pub fn decl(self) -> ProcessDecl {
        let prog = parser::parse_program(self.template()).expect("framework template parses");
        match prog.paragraphs.into_iter().next() {
            Some(Paragraph::Circus(CircusParagraph::Process(d))) => d,
            _ => unreachable!("framework template is a process declaration"),
        }
    }
}

impl fmt::Display for FrameworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let l = s.to_ascii_lowercase();
        let l = l.strip_suffix("fw").unwrap_or(&l);
        Ok(match l {
            "safelet" => FrameworkKind::SafeletFW,
            "sequencer" => FrameworkKind::SequencerFW,
            "mission" => FrameworkKind::MissionFW,
            "peh" | "periodic" => FrameworkKind::PEHFW,
            "apeh" | "aperiodic" => FrameworkKind::APEHFW,
            _ => return Err(format!("unknown framework kind `{s}`")),
        })
    }
}

const SAFELET_FW: &str = "
process SafeletFW = id : ID @ begin
  Execute =
    getSequencerCall!id!id -> getSequencerRet!id!id?s ->
      if s != null then start_sequencer!s -> done_sequencer!s -> Skip
      [] s = null then Skip
      fi
  @ safeletInitializeCall!id!id -> safeletInitializeRet!id!id -> Execute ; end_safelet_app -> Skip
end";

const SEQUENCER_FW: &str = "
process SequencerFW = id : ID @ begin
  Select =
    mu X @ getNextMissionCall!id!id -> getNextMissionRet!id!id?m ->
      if m != null then start_mission!m -> done_mission!m -> X
      [] m = null then Skip
      fi
  @ start_sequencer!id -> Select ; end_sequencer_app -> done_sequencer!id -> Skip
end";

const MISSION_FW: &str = "
process MissionFW = id : ID @ begin
  Run =
    missionInitializeCall!id!id -> missionInitializeRet!id!id ->
    startHandlersCall!id!id -> startHandlersRet!id!id?any ->
      (if any then requestTerminationCall?h!id -> requestTerminationRet!h!id -> Skip
       [] not any then Skip
       fi) ;
    terminateHandlersCall!id!id -> terminateHandlersRet!id!id ->
    cleanupCall!id!id -> cleanupRet!id!id -> done_mission!id -> Skip
  @ mu X @ start_mission!id -> Run ; X
end";

const PEH_FW: &str = "
process PEHFW = id : ID @ begin
  state [start : Nat, period : Nat]
  Execute =
    wait start ;
    ((mu X @ (((handleAsyncEventCall!id!id -> handleAsyncEventRet!id!id -> Skip) endby period ; X)
              [] done_handler!id -> Skip))
     [| {} | {| handleAsyncEventCall.id, done_handler.id |} | {} |]
     ((mu Y @ ((handleAsyncEventCall!id!id -> wait period) startby 0) ; Y) /\\ done_handler!id -> Skip))
  @ mu X @ start_peh?o!id?s?p -> (start := s ; period := p) ; Execute ; X
end";

const APEH_FW: &str = "
process APEHFW = id : ID @ begin
  Execute =
    mu X @ (release.id -> handleAsyncEventCall!id!id -> handleAsyncEventRet!id!id -> X
            [] done_handler!id -> Skip)
  @ mu X @ start_apeh?o!id -> Execute ; X
end";

/// Declarations of every framework channel.
pub fn channel_decls() -> Vec<ChannelDecl> {
    let d = |names: &[&str], sorts: &[Sort]| ChannelDecl {
        names: names.iter().map(|s| s.to_string()).collect(),
        sorts: sorts.to_vec(),
    };
    use Sort::{Bool, Id, Nat};
    vec![
        d(
            &[
                "safeletInitializeCall",
                "safeletInitializeRet",
                "getSequencerCall",
                "getNextMissionCall",
                "missionInitializeCall",
                "missionInitializeRet",
                "startHandlersCall",
                "terminateHandlersCall",
                "terminateHandlersRet",
                "cleanupCall",
                "cleanupRet",
                "requestTerminationCall",
                "requestTerminationRet",
                "handleAsyncEventCall",
                "handleAsyncEventRet",
                "start_apeh",
            ],
            &[Id, Id],
        ),
        d(&["getSequencerRet", "getNextMissionRet"], &[Id, Id, Id]),
        d(&["startHandlersRet"], &[Id, Id, Bool]),
        d(&["start_sequencer", "done_sequencer", "start_mission", "done_mission", "done_handler", "release"], &[Id]),
        d(&["start_peh"], &[Id, Id, Nat, Nat]),
        d(&["end_safelet_app", "end_sequencer_app", "end_mission_app", "end_handler_app"], &[]),
    ]
}

/// The template of `kind` with `id` replaced by the component identifier.
pub fn make_fw(kind: FrameworkKind, id: &str) -> Process {
    let d = kind.decl();
    let f = |n: &str| (n == "id").then(|| id.to_string());
    match d.body {
        Process::Basic(b) => Process::Basic(BasicProcess {
            state: b.state,
            actions: b.actions.into_iter().map(|(n, a)| (n, a.rename_names(&f))).collect(),
            main: b.main.rename_names(&f),
        }),
        p => p,
    }
}

pub fn make_safelet_fw(id: &str) -> Process {
    make_fw(FrameworkKind::SafeletFW, id)
}

pub fn make_sequencer_fw(id: &str) -> Process {
    make_fw(FrameworkKind::SequencerFW, id)
}

pub fn make_mission_fw(id: &str) -> Process {
    make_fw(FrameworkKind::MissionFW, id)
}

pub fn make_peh_fw(id: &str) -> Process {
    make_fw(FrameworkKind::PEHFW, id)
}

pub fn make_apeh_fw(id: &str) -> Process {
    make_fw(FrameworkKind::APEHFW, id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretty;

    #[test]
    fn templates_parse_and_round_trip() {
        for k in FrameworkKind::ALL {
            let d = k.decl();
            let text = pretty::circus_paragraph(&CircusParagraph::Process(d.clone()));
            let again = parser::parse_program(&text).unwrap();
            assert_eq!(again.paragraphs, vec![Paragraph::Circus(CircusParagraph::Process(d))], "{k}");
        }
    }

    #[test]
    fn interface_is_exactly_the_used_channels() {
        for k in FrameworkKind::ALL {
            assert_eq!(process_channels(&k.decl().body), k.interface(), "{k}");
        }
    }

    #[test]
    fn every_interface_channel_is_declared() {
        let declared: BTreeSet<String> = channel_decls().into_iter().flat_map(|d| d.names).collect();
        for k in FrameworkKind::ALL {
            assert!(k.interface().is_subset(&declared), "{k}");
        }
    }

    #[test]
    fn make_substitutes_the_identifier() {
        let p = make_peh_fw("HID");
        let text = pretty::process(&p);
        assert!(text.contains("handleAsyncEventCall!HID!HID"));
        assert!(!text.contains("!id"));
    }

    #[test]
    fn kind_names_parse() {
        assert_eq!("peh".parse::<FrameworkKind>().unwrap(), FrameworkKind::PEHFW);
        assert_eq!("SafeletFW".parse::<FrameworkKind>().unwrap(), FrameworkKind::SafeletFW);
        assert!("bogus".parse::<FrameworkKind>().is_err());
    }
}
