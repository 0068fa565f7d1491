// Minimal declarations for the slice of papaparse we use; the package ships
// without types and the full @types package is not vendored here. CJS shape,
// so consume it via the default import.
declare module 'papaparse' {
  namespace Papa {
    interface ParseError {
      type: string;
      code: string;
      message: string;
      row?: number;
    }

    interface ParseMeta {
      delimiter: string;
      linebreak: string;
      aborted: boolean;
      truncated: boolean;
      fields?: string[];
    }

    interface ParseResult<T> {
      data: T[];
      errors: ParseError[];
      meta: ParseMeta;
    }

    interface ParseConfig {
      header?: boolean;
      dynamicTyping?: boolean;
      skipEmptyLines?: boolean | 'greedy';
      delimiter?: string;
    }

    function parse<T>(input: string, config?: ParseConfig): ParseResult<T>;
  }

  export = Papa;
}
