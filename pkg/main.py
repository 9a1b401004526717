"""
@file main.py

Main entrypoint for the sojourn-time toolkit. Takes in a configuration file of arguments and
runs one command (eval, sample, validate, fk_check, sweep) against the selected law group, exiting
with 0 on success, 1 on a failed validation, 2 on bad usage and 3 on a numeric failure.
"""
import sys
import hydra
import logging
import pytorch_lightning

from cli.commands import run_command
from omegaconf import DictConfig
from utils.exceptions import EXIT_USAGE, SojournError

log = logging.getLogger(__name__)


@hydra.main(version_base="1.3", config_path="configs", config_name="config")
def main(cfg: DictConfig):
    # Set a consistent seed over the full set for consistent analysis
    pytorch_lightning.seed_everything(cfg.seed, workers=True)

    try:
        code = run_command(cfg)
    except SojournError as e:
        log.error(f"=> {type(e).__name__}: {e}")
        code = e.exit_code
    except NotImplementedError as e:
        log.error(f"=> {e}")
        code = EXIT_USAGE

    sys.exit(code)


if __name__ == '__main__':
    main()
