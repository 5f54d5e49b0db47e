//! Read-only two-pane trace browser. [`Inspector`] holds all state and
//! produces the text of both panes; [`browse`] only draws and reads keys.

use std::io;

use justact::dataplane::AccessOutcome;
use justact::runtime::{audit, Entry, Outcome, TraceEvent, Update};
use ratatui::crossterm::event::{self, Event, KeyCode, KeyEventKind};
use ratatui::layout::{Constraint, Layout};
use ratatui::style::{Modifier, Style};
use ratatui::text::Line;
use ratatui::widgets::{Block, Borders, List, ListState, Paragraph};
use ratatui::{DefaultTerminal, Frame};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Key {
    Up,
    Down,
    PageUp,
    PageDown,
    Home,
    End,
    /// Jump to the next or previous enactment.
    NextEnactment,
    PrevEnactment,
    DetailUp,
    DetailDown,
    Quit,
}

const PAGE: usize = 10;

pub struct Inspector {
    events: Vec<TraceEvent>,
    selected: usize,
    detail_scroll: u16,
}

impl Inspector {
    pub fn new(events: Vec<TraceEvent>) -> Self {
        Inspector {
            events,
            selected: 0,
            detail_scroll: 0,
        }
    }

    pub fn selected(&self) -> usize {
        self.selected
    }

    pub fn detail_scroll(&self) -> u16 {
        self.detail_scroll
    }

    pub fn select(&mut self, index: usize) -> bool {
        if index >= self.events.len() {
            return false;
        }
        self.selected = index;
        self.detail_scroll = 0;
        true
    }

    fn is_enactment(&self, index: usize) -> bool {
        audit(&self.events, index).is_ok()
    }

    /// Applies a key; returns `false` once the user asks to quit.
    pub fn handle(&mut self, key: Key) -> bool {
        let last = self.events.len().saturating_sub(1);
        let target = match key {
            Key::Quit => return false,
            Key::Up => self.selected.saturating_sub(1),
            Key::Down => (self.selected + 1).min(last),
            Key::PageUp => self.selected.saturating_sub(PAGE),
            Key::PageDown => (self.selected + PAGE).min(last),
            Key::Home => 0,
            Key::End => last,
            Key::NextEnactment => (self.selected + 1..self.events.len())
                .find(|&i| self.is_enactment(i))
                .unwrap_or(self.selected),
            Key::PrevEnactment => (0..self.selected)
                .rev()
                .find(|&i| self.is_enactment(i))
                .unwrap_or(self.selected),
            Key::DetailUp => {
                self.detail_scroll = self.detail_scroll.saturating_sub(1);
                return true;
            }
            Key::DetailDown => {
                self.detail_scroll = self
                    .detail_scroll
                    .saturating_add(1)
                    .min(self.detail().len() as u16);
                return true;
            }
        };
        if target != self.selected {
            self.select(target);
        }
        true
    }

    /// One line per event for the left pane.
    pub fn rows(&self) -> Vec<String> {
        self.events.iter().map(row).collect()
    }

    /// The right pane for the selected event.
    pub fn detail(&self) -> Vec<String> {
        let Some(event) = self.events.get(self.selected) else {
            return vec!["(empty trace)".into()];
        };
        if let Ok(report) = audit(&self.events, self.selected) {
            return report.to_string().lines().map(str::to_string).collect();
        }
        let json = serde_json::to_string_pretty(event).expect("events serialise");
        std::iter::once(row(event))
            .chain(std::iter::once(String::new()))
            .chain(json.lines().map(str::to_string))
            .collect()
    }
}

fn status(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Applied => "applied".into(),
        Outcome::Rejected(r) => format!("rejected: {r}"),
    }
}

fn row(event: &TraceEvent) -> String {
    let i = event.index;
    match &event.entry {
        Entry::Control(r) => {
            let what = match &r.update {
                Update::State { message } => format!("{} states {}", r.issuer, message.id),
                Update::Enact { action } => {
                    let verdict = match &r.permission {
                        Some(p) if p.permitted => "permitted",
                        Some(_) => "prohibited",
                        None => "?",
                    };
                    format!("{} enacts on {} [{verdict}]", action.actor, action.basis.id)
                }
                Update::Agree { messages } => {
                    let ids: Vec<String> = messages.iter().map(|m| m.id.to_string()).collect();
                    format!("{} agrees [{}]", r.issuer, ids.join(", "))
                }
                Update::Gossip { from, to, message } => format!("{from} -> {to} {}", message.id),
                Update::Forget { agent, message } => format!("{agent} forgets {}", message.id),
            };
            match &r.outcome {
                Outcome::Applied => format!("#{i:<4} {what}"),
                other => format!("#{i:<4} {what} ({})", status(other)),
            }
        }
        Entry::DataPlane(r) => {
            let verdict = match &r.outcome {
                AccessOutcome::Granted { .. } => "granted".to_string(),
                AccessOutcome::Denied { reason } => format!("denied: {reason}"),
            };
            let q = &r.request;
            format!(
                "#{i:<4} {} {} {} via #{} ({verdict})",
                q.agent, q.access, q.variable, q.action_ref
            )
        }
    }
}

fn key(code: KeyCode) -> Option<Key> {
    Some(match code {
        KeyCode::Up | KeyCode::Char('k') => Key::Up,
        KeyCode::Down | KeyCode::Char('j') => Key::Down,
        KeyCode::PageUp => Key::PageUp,
        KeyCode::PageDown => Key::PageDown,
        KeyCode::Home | KeyCode::Char('g') => Key::Home,
        KeyCode::End | KeyCode::Char('G') => Key::End,
        KeyCode::Char('n') | KeyCode::Tab => Key::NextEnactment,
        KeyCode::Char('p') | KeyCode::BackTab => Key::PrevEnactment,
        KeyCode::Char('J') => Key::DetailDown,
        KeyCode::Char('K') => Key::DetailUp,
        KeyCode::Char('q') | KeyCode::Esc => Key::Quit,
        _ => return None,
    })
}

pub fn draw(frame: &mut Frame, inspector: &Inspector) {
    let [main, help] =
        Layout::vertical([Constraint::Min(3), Constraint::Length(1)]).areas(frame.area());
    let [left, right] =
        Layout::horizontal([Constraint::Percentage(45), Constraint::Percentage(55)]).areas(main);
    let list = List::new(inspector.rows())
        .block(Block::default().borders(Borders::ALL).title(" events "))
        .highlight_style(Style::default().add_modifier(Modifier::REVERSED));
    let mut state = ListState::default().with_selected(Some(inspector.selected()));
    frame.render_stateful_widget(list, left, &mut state);
    let detail: Vec<Line> = inspector.detail().into_iter().map(Line::from).collect();
    let pane = Paragraph::new(detail)
        .block(
            Block::default()
                .borders(Borders::ALL)
                .title(format!(" event #{} ", inspector.selected())),
        )
        .scroll((inspector.detail_scroll(), 0));
    frame.render_widget(pane, right);
    frame.render_widget(
        Line::from(" j/k move  n/p next/prev enactment  J/K scroll detail  g/G ends  q quit"),
        help,
    );
}

fn event_loop(terminal: &mut DefaultTerminal, mut inspector: Inspector) -> io::Result<()> {
    loop {
        terminal.draw(|frame| draw(frame, &inspector))?;
        if let Event::Key(k) = event::read()? {
            if k.kind == KeyEventKind::Press {
                if let Some(key) = key(k.code) {
                    if !inspector.handle(key) {
                        return Ok(());
                    }
                }
            }
        }
    }
}

pub fn browse(inspector: Inspector) -> io::Result<()> {
    let mut terminal = ratatui::try_init()?;
    let result = event_loop(&mut terminal, inspector);
    ratatui::restore();
    result
}
