from cli.commands import COMMANDS, cmd_eval, cmd_fk_check, cmd_sample, cmd_sweep, cmd_validate, run_command
