"""Command handlers for the pointing_cli entrypoint."""
