import sys

from cli.handlers import create_main_parser, run_gen_cli, run_pipeline_cli, run_score_cli

COMMANDS = {
    "run": run_pipeline_cli,
    "score": run_score_cli,
    "gen": run_gen_cli,
}


def main():
    """Main application entry point"""
    # Handle --version before anything else
    if len(sys.argv) > 1 and sys.argv[1] in ["-V", "--version"]:
        from version import VERSION
        print(VERSION)
        return 0

    if len(sys.argv) > 1 and sys.argv[1] in COMMANDS:
        return COMMANDS[sys.argv[1]]()

    # No command, unknown command or help request
    parser = create_main_parser()
    args = parser.parse_args()
    if args.command is None:
        parser.print_help()
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
