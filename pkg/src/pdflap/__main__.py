"""Allow running pdflap as `python -m pdflap`."""

from pdflap.cli import main

main()
