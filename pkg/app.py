"""Main entry point for RecordLab.

``python app.py <command>`` runs a RecordLab command; ``flask --app app
<command>`` finds the same commands through the application below.
"""

import sys

from recordlab import create_app, main

app = create_app()

if __name__ == '__main__':
    sys.exit(main())
