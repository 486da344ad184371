//! Cuts a thread at its first staff reply and replays it at an earlier
//! moment.

use intervene::corpus::{label_thread, rewind, truncate_at_first_intervention};
use intervene::{AuthorRole, Comment, ForumType, Post, Thread};

fn item(id: &str, role: AuthorRole, ts: i64, text: &str) -> Post {
    Post {
        id: id.into(),
        author_role: role,
        timestamp: ts,
        text: text.into(),
        comments: Vec::new(),
    }
}

fn main() {
    let mut opening = item("p0", AuthorRole::Student, 100, "Quiz 3 question 2 looks wrong.");
    opening.comments.push(Comment {
        id: "p0c0".into(),
        author_role: AuthorRole::Student,
        timestamp: 150,
        text: "Same here.".into(),
    });
    let thread = Thread {
        course_id: "demo-001".into(),
        id: "t1".into(),
        forum_type: ForumType::Errata,
        title: "Quiz 3 answer key".into(),
        posts: vec![
            opening,
            item("p1", AuthorRole::Staff, 200, "Thanks, we fixed the key."),
            item("p2", AuthorRole::Student, 300, "Thanks, that helps."),
        ],
    };

    let cut = truncate_at_first_intervention(&thread);
    println!("intervened: {}  degenerate: {}", cut.intervened, cut.degenerate);
    println!("label after truncation: {}", label_thread(&cut.thread));
    for (role, ts, text) in cut.thread.items() {
        println!("  kept {role:?} @{ts}: {text}");
    }

    let early = rewind(&thread, 120);
    println!("items visible at t=120: {}", early.n_items());
}
