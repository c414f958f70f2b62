//! Drive the command-line front end in-process and print its JSON document.

use modcancel::cli::invoke;

fn main() {
    let args = [
        "modcancel",
        "verify",
        "--theorem",
        "3.3",
        "--m0",
        "0",
        "--format",
        "json",
    ];
    match invoke(args) {
        Ok(inv) => {
            print!("{}", inv.rendered());
            eprintln!("exit status would be {}", inv.exit_code());
        }
        Err(e) => eprintln!("{e}"),
    }
}
